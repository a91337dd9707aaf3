#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sig/image.hpp"

namespace sig {

/// Nonempty subset of {R, G, B}. Exactly seven values exist; the canonical
/// token lists members in R, G, B order ("RG", never "GR").
class ChannelMask {
public:
    static constexpr std::uint8_t kR = 1;
    static constexpr std::uint8_t kG = 2;
    static constexpr std::uint8_t kB = 4;

    /// Throws InvalidParams for 0 or values above 7.
    static ChannelMask from_bits(std::uint8_t bits);
    static std::optional<ChannelMask> from_token(std::string_view token);
    static ChannelMask R() { return ChannelMask(kR); }
    static ChannelMask G() { return ChannelMask(kG); }
    static ChannelMask B() { return ChannelMask(kB); }
    static ChannelMask RGB() { return ChannelMask(kR | kG | kB); }

    /// The seven masks in the order R, G, B, RG, RB, GB, RGB.
    static const std::array<ChannelMask, 7>& all();

    std::uint8_t bits() const noexcept { return bits_; }
    bool contains(Channel ch) const noexcept { return (bits_ >> static_cast<unsigned>(ch)) & 1u; }
    bool is_subset_of(ChannelMask other) const noexcept { return (bits_ & ~other.bits_) == 0; }
    unsigned size() const noexcept;
    std::string token() const;

    friend bool operator==(ChannelMask, ChannelMask) = default;

private:
    explicit constexpr ChannelMask(std::uint8_t bits) : bits_(bits) {}
    std::uint8_t bits_;
};

/// Everything needed to locate the embedded region: which channels, how many
/// leading rows, and how many low bits per selected channel byte.
struct EmbedParams {
    ChannelMask mask = ChannelMask::RGB();
    std::uint32_t rows = 1;
    std::uint32_t bits = 1;

    /// Throws InvalidParams unless rows >= 1 and 1 <= bits <= 8.
    void validate() const;
    std::string describe() const;  // e.g. "mask=RG rows=5 bits=3"

    friend bool operator==(const EmbedParams&, const EmbedParams&) = default;
};

struct PayloadSpec {
    std::vector<std::uint8_t> message;
    std::uint64_t pad_seed = 0;

    std::uint64_t message_bits() const noexcept { return std::uint64_t{message.size()} * 8; }
};

/// Ordered 0/1 values, one per byte.
class BitStream {
public:
    BitStream() = default;
    explicit BitStream(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {}

    std::size_t size() const noexcept { return bits_.size(); }
    bool empty() const noexcept { return bits_.empty(); }
    std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
    std::span<const std::uint8_t> bits() const noexcept { return bits_; }
    void push_back(std::uint8_t bit) { bits_.push_back(bit & 1u); }
    void reserve(std::size_t n) { bits_.reserve(n); }

    /// MSB-first serialization of bytes.
    static BitStream from_bytes(std::span<const std::uint8_t> bytes);
    /// Inverse of from_bytes; a trailing partial byte is zero-padded on the right.
    std::vector<std::uint8_t> to_bytes() const;

    friend bool operator==(const BitStream&, const BitStream&) = default;

private:
    std::vector<std::uint8_t> bits_;
};

/// SplitMix64 (Steele, Lea, Flood 2014). Portable and fully specified, so the
/// same seed yields the same padding on every platform.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}
    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// width * rows * |mask| * bits.
std::uint64_t capacity_bits(std::uint32_t width, const EmbedParams& params);

/// Exactly `capacity` bits: the message MSB-first, then padding drawn from
/// SplitMix64(pad_seed), each 64-bit output consumed from bit 63 down to bit 0.
/// Throws PayloadTooLarge when the message alone exceeds capacity.
BitStream expand_payload(const PayloadSpec& payload, std::uint64_t capacity);

/// Rewrites bits 0..bits-1 of every selected channel byte in rows
/// 0..rows-1. Slots are visited row-major, then R, G, B within a pixel; the
/// first bit consumed for a byte lands in bit 0.
RasterImage embed(const RasterImage& cover, const EmbedParams& params, const PayloadSpec& payload);

/// Reads the first n_bits slots in embed order.
BitStream extract(const RasterImage& stego, const EmbedParams& params, std::uint64_t n_bits);

/// Convenience: extract and pack `n_bytes` message bytes.
std::vector<std::uint8_t> extract_message(const RasterImage& stego, const EmbedParams& params, std::size_t n_bytes);

}  // namespace sig
