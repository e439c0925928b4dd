#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace entropytest {

// A non-empty binary word x = x_1 x_2 ... x_n. Bits are stored one per byte;
// operator[] is 0-based, so x_i == seq[i-1].
class BitSequence {
public:
    explicit BitSequence(std::vector<uint8_t> bits) : bits_(std::move(bits)) {
        if (bits_.empty()) throw std::invalid_argument("BitSequence: empty sequence");
        for (uint8_t b : bits_)
            if (b > 1) throw std::invalid_argument("BitSequence: symbol not in {0,1}");
    }

    // Parse a string of '0'/'1' characters.
    static BitSequence from_string(std::string_view s) {
        std::vector<uint8_t> bits;
        bits.reserve(s.size());
        for (char c : s) {
            if (c != '0' && c != '1')
                throw std::invalid_argument("BitSequence: expected only '0'/'1'");
            bits.push_back(static_cast<uint8_t>(c - '0'));
        }
        return BitSequence(std::move(bits));
    }

    // The n-bit word whose bits read x_1 .. x_n = value's bits MSB-first.
    // Enumerating value over 0..2^n-1 enumerates all of {0,1}^n.
    static BitSequence from_word(uint64_t value, int n) {
        if (n < 1 || n > 63) throw std::invalid_argument("BitSequence: word length out of range");
        std::vector<uint8_t> bits(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i)
            bits[static_cast<size_t>(i)] = static_cast<uint8_t>((value >> (n - 1 - i)) & 1u);
        return BitSequence(std::move(bits));
    }

    size_t length() const { return bits_.size(); }
    uint8_t operator[](size_t i) const { return bits_[i]; }
    const std::vector<uint8_t>& bits() const { return bits_; }

    uint64_t count_ones() const {
        uint64_t k = 0;
        for (uint8_t b : bits_) k += b;
        return k;
    }

    BitSequence complement() const {
        std::vector<uint8_t> out(bits_.size());
        for (size_t i = 0; i < bits_.size(); ++i) out[i] = static_cast<uint8_t>(1 - bits_[i]);
        return BitSequence(std::move(out));
    }

    std::string to_string() const {
        std::string s(bits_.size(), '0');
        for (size_t i = 0; i < bits_.size(); ++i) s[i] = static_cast<char>('0' + bits_[i]);
        return s;
    }

    bool operator==(const BitSequence& other) const { return bits_ == other.bits_; }

private:
    std::vector<uint8_t> bits_;
};

}  // namespace entropytest
