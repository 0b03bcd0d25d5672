#pragma once

// Writes generated families to a directory with stable file names.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ectl/error.hpp"
#include "ectl/io.hpp"
#include "ectl/oracle/families.hpp"

namespace ectl::oracle {

inline void write_text(const std::filesystem::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + file.string());
    out << text;
}

/// fairness_T_<n>_<k>.lts and fairness_S_<n>_<k>.lts. Returns the paths.
inline std::vector<std::filesystem::path> emit_fairness(const std::filesystem::path& dir, std::size_t n,
                                                         std::size_t k) {
    std::filesystem::create_directories(dir);
    auto [t, s] = gen_fairness_family(n, k);
    const std::string suffix = std::to_string(n) + "_" + std::to_string(k) + ".lts";
    std::vector<std::filesystem::path> out{dir / ("fairness_T_" + suffix), dir / ("fairness_S_" + suffix)};
    write_text(out[0], serialize_lts(t));
    write_text(out[1], serialize_lts(s));
    return out;
}

/// <stem>.lts, <stem>.aut and <stem>.ectl for one tiling instance.
inline std::vector<std::filesystem::path> emit_tiling(const std::filesystem::path& dir, const std::string& stem,
                                                       const TilingInstance& inst) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> out{dir / (stem + ".lts"), dir / (stem + ".aut"), dir / (stem + ".ectl")};
    write_text(out[0], serialize_lts(inst.system));
    write_text(out[1], serialize_aut(inst.violations));
    write_text(out[2], to_string(*inst.formula) + "\n");
    return out;
}

/// The default corpus: the two fairness pairs used by the invariance
/// battery and a handful of micro tilings.
inline std::vector<std::filesystem::path> emit_corpus(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> all;
    for (auto [n, k] : {std::pair<std::size_t, std::size_t>{3, 2}, {4, 3}})
        for (auto& p : emit_fairness(dir, n, k)) all.push_back(p);
    struct Spec {
        const char* stem;
        std::size_t n;
        std::vector<std::string> tiles;
        TilePairs h, v;
    };
    const std::vector<Spec> specs{
        {"tiling_constant_2", 2, {"t"}, {{"t", "t"}}, {{"t", "t"}}},
        {"tiling_no_h_2", 2, {"t"}, {}, {{"t", "t"}}},
        {"tiling_checker_2", 2, {"a", "b"}, {{"a", "b"}, {"b", "a"}}, {{"a", "b"}, {"b", "a"}}},
        {"tiling_stripes_3", 3, {"a", "b"}, {{"a", "a"}, {"b", "b"}}, {{"a", "b"}}},
    };
    for (const auto& sp : specs)
        for (auto& p : emit_tiling(dir, sp.stem, gen_micro_tiling(sp.n, sp.tiles, sp.h, sp.v))) all.push_back(p);
    return all;
}

} // namespace ectl::oracle
