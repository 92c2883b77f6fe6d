#pragma once

// Text serialization of fitted forests.
//
// Format (version 1), one record per line, fields separated by single spaces,
// reals written as C99 hexadecimal floats so a round trip is bit-exact:
//
//   rfcast-forest 1
//   config <n_trees> <mtry|auto> <min_node_size> <bootstrap 0|1> <seed>
//   p <feature count>
//   y_range <y_min> <y_max>
//   oob <mse|none>
//   tree <node count>
//   <split_var> <value> <left> <right> <n_samples>     (one line per node)
//   ...                                               (repeated per tree)
//   end

#include "rfcast/error.hpp"
#include "rfcast/forest.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>

namespace rfcast {

inline constexpr const char* kForestMagic = "rfcast-forest";
inline constexpr int kForestFormatVersion = 1;

namespace detail {

inline std::string hex_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::hex);
    if (ec != std::errc{}) {
        throw DomainError("cannot format double");
    }
    return {buf, ptr};
}

inline double parse_hex_double(const std::string& token) {
    double v = 0.0;
    std::string_view s(token);
    bool negative = false;
    if (!s.empty() && s.front() == '-') {
        negative = true;
        s.remove_prefix(1);
    }
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, std::chars_format::hex);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError("forest file: bad real '" + token + "'");
    }
    return negative ? -v : v;
}

inline void expect_token(std::istream& in, const std::string& want) {
    std::string got;
    if (!(in >> got) || got != want) {
        throw ParseError("forest file: expected '" + want + "', got '" + got + "'");
    }
}

template <class T>
T read_value(std::istream& in, const char* what) {
    T v{};
    if (!(in >> v)) {
        throw ParseError(std::string("forest file: cannot read ") + what);
    }
    return v;
}

} // namespace detail

inline void write_forest(std::ostream& out, const Forest& forest) {
    const auto& c = forest.config();
    out << kForestMagic << ' ' << kForestFormatVersion << '\n';
    out << "config " << c.n_trees << ' ' << (c.mtry ? std::to_string(*c.mtry) : std::string("auto")) << ' '
        << c.min_node_size << ' ' << (c.bootstrap ? 1 : 0) << ' ' << c.seed << '\n';
    out << "p " << forest.p() << '\n';
    out << "y_range " << detail::hex_double(forest.y_min()) << ' ' << detail::hex_double(forest.y_max()) << '\n';
    out << "oob " << (forest.oob_mse() ? detail::hex_double(*forest.oob_mse()) : std::string("none")) << '\n';
    for (const auto& tree : forest.trees()) {
        out << "tree " << tree.size() << '\n';
        for (const auto& n : tree.nodes()) {
            out << n.split_var << ' ' << detail::hex_double(n.value) << ' ' << n.left << ' ' << n.right << ' '
                << n.n_samples << '\n';
        }
    }
    out << "end\n";
}

[[nodiscard]] inline Forest read_forest(std::istream& in) {
    detail::expect_token(in, kForestMagic);
    const int version = detail::read_value<int>(in, "version");
    if (version != kForestFormatVersion) {
        throw ParseError("forest file: unsupported version " + std::to_string(version));
    }
    detail::expect_token(in, "config");
    ForestConfig c;
    c.n_trees = detail::read_value<std::size_t>(in, "n_trees");
    const auto mtry = detail::read_value<std::string>(in, "mtry");
    if (mtry != "auto") {
        c.mtry = std::stoull(mtry);
    }
    c.min_node_size = detail::read_value<std::size_t>(in, "min_node_size");
    c.bootstrap = detail::read_value<int>(in, "bootstrap") != 0;
    c.seed = detail::read_value<std::uint64_t>(in, "seed");
    detail::expect_token(in, "p");
    const auto p = detail::read_value<std::size_t>(in, "p");
    detail::expect_token(in, "y_range");
    const double y_min = detail::parse_hex_double(detail::read_value<std::string>(in, "y_min"));
    const double y_max = detail::parse_hex_double(detail::read_value<std::string>(in, "y_max"));
    detail::expect_token(in, "oob");
    std::optional<double> oob;
    if (const auto tok = detail::read_value<std::string>(in, "oob"); tok != "none") {
        oob = detail::parse_hex_double(tok);
    }
    std::vector<Tree> trees;
    trees.reserve(c.n_trees);
    for (std::size_t t = 0; t < c.n_trees; ++t) {
        detail::expect_token(in, "tree");
        const auto count = detail::read_value<std::size_t>(in, "node count");
        std::vector<TreeNode> nodes(count);
        for (auto& n : nodes) {
            n.split_var = detail::read_value<std::int32_t>(in, "split_var");
            n.value = detail::parse_hex_double(detail::read_value<std::string>(in, "node value"));
            n.left = detail::read_value<std::uint32_t>(in, "left");
            n.right = detail::read_value<std::uint32_t>(in, "right");
            n.n_samples = detail::read_value<std::uint32_t>(in, "n_samples");
        }
        trees.emplace_back(std::move(nodes));
    }
    detail::expect_token(in, "end");
    return Forest(std::move(c), p, std::move(trees), y_min, y_max, oob);
}

inline void save_forest(const std::string& path, const Forest& forest) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open '" + path + "' for writing");
    }
    write_forest(out, forest);
    if (!out) {
        throw Error("failed writing '" + path + "'");
    }
}

[[nodiscard]] inline Forest load_forest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path + "'");
    }
    return read_forest(in);
}

} // namespace rfcast
