#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace l1atf {

// Dictionary blocks, in canonical column (and cycling) order.
enum class BlockKind : std::uint8_t { Slope = 0, Step = 1, Spike = 2, Sine = 3, Cosine = 4 };

inline constexpr std::array<BlockKind, 5> all_block_kinds{
    BlockKind::Slope, BlockKind::Step, BlockKind::Spike, BlockKind::Sine, BlockKind::Cosine};

inline constexpr std::string_view to_string(BlockKind kind)
{
    switch (kind) {
    case BlockKind::Slope: return "slope";
    case BlockKind::Step: return "step";
    case BlockKind::Spike: return "spike";
    case BlockKind::Sine: return "sine";
    case BlockKind::Cosine: return "cosine";
    }
    return "?";
}

inline std::optional<BlockKind> parse_block_kind(std::string_view name)
{
    for (auto kind : all_block_kinds)
        if (to_string(kind) == name) return kind;
    return std::nullopt;
}

inline constexpr bool is_trig(BlockKind kind)
{
    return kind == BlockKind::Sine || kind == BlockKind::Cosine;
}

/// Identifies one column of the implicit dictionary.
///
/// For Slope and Step, `index` is the knot j in [0, n-2]; for Spike it is the
/// sample in [0, n-1]; for Sine and Cosine it indexes the frequency list.
/// Ordering is by block, then index, which is the solver's cycling order.
struct ColumnId {
    BlockKind kind = BlockKind::Slope;
    std::size_t index = 0;

    friend constexpr auto operator<=>(const ColumnId&, const ColumnId&) = default;
};

inline std::string to_string(const ColumnId& c)
{
    return std::string(to_string(c.kind)) + "[" + std::to_string(c.index) + "]";
}

/// Small bitset over block kinds.
class BlockSet {
public:
    constexpr BlockSet() = default;

    static constexpr BlockSet all()
    {
        BlockSet s;
        s.bits_ = 0x1F;
        return s;
    }

    static constexpr BlockSet none() { return {}; }

    constexpr BlockSet& insert(BlockKind kind)
    {
        bits_ |= bit(kind);
        return *this;
    }

    constexpr BlockSet& erase(BlockKind kind)
    {
        bits_ &= static_cast<std::uint8_t>(~bit(kind));
        return *this;
    }

    constexpr bool contains(BlockKind kind) const { return (bits_ & bit(kind)) != 0; }
    constexpr bool empty() const { return bits_ == 0; }

    friend constexpr bool operator==(BlockSet, BlockSet) = default;

private:
    static constexpr std::uint8_t bit(BlockKind kind)
    {
        return static_cast<std::uint8_t>(1U << static_cast<unsigned>(kind));
    }

    std::uint8_t bits_ = 0;
};

} // namespace l1atf
