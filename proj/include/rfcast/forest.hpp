#pragma once

#include "rfcast/design.hpp"
#include "rfcast/error.hpp"
#include "rfcast/parallel.hpp"
#include "rfcast/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rfcast {

/**
 * Random-forest regression settings. The defaults are the long-standing
 * regression defaults of R's randomForest package: 500 trees, mtry =
 * max(1, floor(p/3)), terminal node size 5, bootstrap of size n drawn with
 * replacement, no depth limit.
 */
struct ForestConfig {
    std::size_t n_trees = 500;
    std::optional<std::size_t> mtry;  // unset: max(1, p / 3)
    std::size_t min_node_size = 5;
    bool bootstrap = true;
    std::uint64_t seed = 0;

    [[nodiscard]] std::size_t resolved_mtry(std::size_t p) const {
        return mtry.value_or(std::max<std::size_t>(1, p / 3));
    }

    void validate(std::size_t p) const {
        if (n_trees < 1) {
            throw ConfigError("n_trees must be >= 1");
        }
        if (min_node_size < 1) {
            throw ConfigError("min_node_size must be >= 1");
        }
        const auto m = resolved_mtry(p);
        if (m < 1 || m > p) {
            throw ConfigError("mtry must be in 1.." + std::to_string(p) + ", got " + std::to_string(m));
        }
    }

    friend bool operator==(const ForestConfig&, const ForestConfig&) = default;
};

/// Node of a flattened regression tree. Leaves have split_var == kLeaf and
/// carry their prediction in `value`; internal nodes carry the split threshold.
struct TreeNode {
    static constexpr std::int32_t kLeaf = -1;

    std::int32_t split_var = kLeaf;
    double value = 0.0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    std::uint32_t n_samples = 0;

    [[nodiscard]] bool is_leaf() const noexcept { return split_var == kLeaf; }

    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// A binary regression tree stored as a node array; node 0 is the root.
class Tree {
public:
    Tree() = default;
    explicit Tree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) { validate(); }

    [[nodiscard]] static Tree leaf(double prediction, std::uint32_t n_samples = 1) {
        return Tree({TreeNode{TreeNode::kLeaf, prediction, 0, 0, n_samples}});
    }

    /// Depth-one tree: x[var] <= threshold goes to `left_value`.
    [[nodiscard]] static Tree stump(std::int32_t var, double threshold, double left_value, double right_value) {
        return Tree({TreeNode{var, threshold, 1, 2, 2}, TreeNode{TreeNode::kLeaf, left_value, 0, 0, 1},
                     TreeNode{TreeNode::kLeaf, right_value, 0, 0, 1}});
    }

    [[nodiscard]] const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }

    [[nodiscard]] std::size_t leaf_count() const noexcept {
        return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
    }

    [[nodiscard]] std::int32_t max_split_var() const noexcept {
        std::int32_t m = TreeNode::kLeaf;
        for (const auto& n : nodes_) {
            m = std::max(m, n.split_var);
        }
        return m;
    }

    friend bool operator==(const Tree&, const Tree&) = default;

private:
    void validate() const {
        if (nodes_.empty()) {
            throw DomainError("tree must have at least one node");
        }
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            const auto& n = nodes_[i];
            if (n.is_leaf()) {
                if (n.n_samples < 1) {
                    throw DomainError("leaf " + std::to_string(i) + " has no samples");
                }
                continue;
            }
            if (n.split_var < 0 || n.left <= i || n.right <= i || n.left >= nodes_.size() ||
                n.right >= nodes_.size() || n.left == n.right) {
                throw DomainError("tree node " + std::to_string(i) + " has invalid children");
            }
        }
    }

    std::vector<TreeNode> nodes_;
};

/// Descends the tree: left iff x[split_var] <= split_value.
[[nodiscard]] inline double predict_tree(const Tree& tree, std::span<const double> x) {
    const auto& nodes = tree.nodes();
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
        const auto& n = nodes[i];
        i = x[static_cast<std::size_t>(n.split_var)] <= n.value ? n.left : n.right;
    }
    return nodes[i].value;
}

struct Split {
    std::size_t var = 0;
    double value = 0.0;
    double sse_reduction = 0.0;

    friend bool operator==(const Split&, const Split&) = default;
};

namespace detail {

// Reductions within this fraction of the parent SSE count as ties.
inline constexpr double kSplitTieTolerance = 1e-12;

struct SplitScratch {
    std::vector<std::pair<double, double>> pairs;  // (x, y)
};

inline bool all_equal(std::span<const double> y, std::span<const std::size_t> rows) {
    for (auto r : rows) {
        if (y[r] != y[rows.front()]) {
            return false;
        }
    }
    return true;
}

inline double split_midpoint(double lo, double hi) {
    const double mid = lo + (hi - lo) / 2.0;
    // Adjacent doubles: the midpoint can round up to `hi`, which would send `hi` left.
    return (mid < hi) ? mid : lo;
}

struct NodeStats {
    double mean = 0.0;
    double total = 0.0;  // sum of centred y; zero up to rounding
    double base = 0.0;   // total^2 / n
    double tol = 0.0;    // tie tolerance for this node
};

template <class YAt>
NodeStats node_stats(std::size_t n, YAt y_at) {
    NodeStats st;
    for (std::size_t i = 0; i < n; ++i) {
        st.mean += y_at(i);
    }
    st.mean /= static_cast<double>(n);
    double parent_sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double c = y_at(i) - st.mean;
        st.total += c;
        parent_sse += c * c;
    }
    st.base = st.total * st.total / static_cast<double>(n);
    st.tol = kSplitTieTolerance * parent_sse;
    return st;
}

// Scans one column whose node rows are already in ascending x order.
// x_at(i) and y_at(i) give the i-th row in that order.
template <class XAt, class YAt>
void scan_sorted_column(std::size_t var, std::size_t n, XAt x_at, YAt y_at, const NodeStats& st,
                        std::optional<Split>& best) {
    if (!(x_at(0) < x_at(n - 1))) {
        return;
    }
    double left_sum = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        left_sum += y_at(i) - st.mean;
        const double x_here = x_at(i);
        const double x_next = x_at(i + 1);
        if (!(x_here < x_next)) {
            continue;
        }
        const auto n_left = static_cast<double>(i + 1);
        const auto n_right = static_cast<double>(n - i - 1);
        const double right_sum = st.total - left_sum;
        const double reduction = left_sum * left_sum / n_left + right_sum * right_sum / n_right - st.base;
        if (!best || reduction > best->sse_reduction + st.tol) {
            best = Split{var, split_midpoint(x_here, x_next), reduction};
        }
    }
}

inline std::optional<Split> accept(std::optional<Split> best, const NodeStats& st) {
    if (!best || !(best->sse_reduction > st.tol)) {
        return std::nullopt;
    }
    return best;
}

inline std::optional<Split> find_best_split_rows(const Matrix& X, std::span<const double> y,
                                                 std::span<const std::size_t> rows,
                                                 std::span<const std::size_t> candidate_vars, SplitScratch& scratch) {
    const std::size_t n = rows.size();
    if (n < 2 || all_equal(y, rows)) {
        return std::nullopt;
    }
    const auto st = node_stats(n, [&](std::size_t i) { return y[rows[i]]; });
    std::optional<Split> best;
    auto& pairs = scratch.pairs;
    for (auto var : candidate_vars) {
        pairs.clear();
        for (auto r : rows) {
            pairs.emplace_back(X(r, var), y[r]);
        }
        std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        scan_sorted_column(
            var, n, [&](std::size_t i) { return pairs[i].first; }, [&](std::size_t i) { return pairs[i].second; }, st,
            best);
    }
    return accept(best, st);
}

} // namespace detail

/**
 * Best variance-reduction split over the candidate columns, using midpoints
 * between consecutive distinct sorted values. Returns nullopt when no
 * candidate column varies or no split lowers the node SSE. Ties go to the
 * lowest variable index, then the lowest split value.
 */
[[nodiscard]] inline std::optional<Split> find_best_split(const Matrix& X_node, std::span<const double> y_node,
                                                          std::span<const std::size_t> candidate_vars) {
    if (X_node.rows() != y_node.size()) {
        throw DomainError("find_best_split: X has " + std::to_string(X_node.rows()) + " rows but y has " +
                          std::to_string(y_node.size()));
    }
    std::vector<std::size_t> rows(X_node.rows());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i] = i;
    }
    std::vector<std::size_t> vars(candidate_vars.begin(), candidate_vars.end());
    std::sort(vars.begin(), vars.end());
    for (auto v : vars) {
        if (v >= X_node.cols()) {
            throw DomainError("candidate variable " + std::to_string(v) + " out of range");
        }
    }
    detail::SplitScratch scratch;
    return detail::find_best_split_rows(X_node, y_node, rows, vars, scratch);
}

namespace detail {

// Column-major copy of the training features plus, per column, the row
// order by ascending value. Built once per forest and shared by every tree.
struct SortedColumns {
    std::size_t n = 0;
    std::size_t p = 0;
    std::vector<double> x;             // x[j * n + r]
    std::vector<std::uint32_t> order;  // order[j * n + k] is the k-th smallest row of column j

    explicit SortedColumns(const Matrix& X) : n(X.rows()), p(X.cols()), x(n * p), order(n * p) {
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t j = 0; j < p; ++j) {
                x[j * n + r] = X(r, j);
            }
        }
        for (std::size_t j = 0; j < p; ++j) {
            const double* col = x.data() + j * n;
            auto* o = order.data() + j * n;
            for (std::size_t r = 0; r < n; ++r) {
                o[r] = static_cast<std::uint32_t>(r);
            }
            std::stable_sort(o, o + n, [col](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });
        }
    }

    [[nodiscard]] const double* column(std::size_t j) const { return x.data() + j * n; }
};

class TreeBuilder {
public:
    TreeBuilder(const SortedColumns& cols, std::span<const double> y, const ForestConfig& config, std::size_t mtry,
                CounterRng& rng)
        : cols_(cols), y_(y), config_(config), mtry_(mtry), rng_(rng) {}

    // Every column keeps the tree's rows in ascending x order and a node is
    // the same index range [begin, end) in all of them. Splitting stably
    // partitions each column, so no node ever sorts.
    Tree build(const std::vector<std::size_t>& rows) {
        nodes_.clear();
        m_ = rows.size();
        counts_.assign(cols_.n, 0);
        for (auto r : rows) {
            ++counts_[r];
        }
        idx_.resize(cols_.p * m_);
        for (std::size_t j = 0; j < cols_.p; ++j) {
            auto* out = idx_.data() + j * m_;
            const auto* order = cols_.order.data() + j * cols_.n;
            for (std::size_t k = 0; k < cols_.n; ++k) {
                for (std::uint32_t c = counts_[order[k]]; c > 0; --c) {
                    *out++ = order[k];
                }
            }
        }
        goes_left_.assign(cols_.n, 0);
        right_.resize(m_);
        grow(0, m_);
        return Tree(std::move(nodes_));
    }

private:
    [[nodiscard]] const std::uint32_t* segment(std::size_t j, std::size_t begin) const {
        return idx_.data() + j * m_ + begin;
    }

    std::uint32_t make_leaf(std::size_t begin, std::size_t end) {
        const auto* rows = segment(0, begin);
        const std::size_t n = end - begin;
        double sum = 0.0;
        double lo = y_[rows[0]];
        double hi = lo;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = y_[rows[i]];
            sum += v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const double mean = std::clamp(sum / static_cast<double>(n), lo, hi);
        nodes_.push_back(TreeNode{TreeNode::kLeaf, mean, 0, 0, static_cast<std::uint32_t>(n)});
        return static_cast<std::uint32_t>(nodes_.size() - 1);
    }

    [[nodiscard]] bool constant_y(std::size_t begin, std::size_t end) const {
        const auto* rows = segment(0, begin);
        for (std::size_t i = 1; i < end - begin; ++i) {
            if (y_[rows[i]] != y_[rows[0]]) {
                return false;
            }
        }
        return true;
    }

    std::optional<Split> best_split(std::size_t begin, std::size_t end) {
        const std::size_t n = end - begin;
        const double* y = y_.data();
        const auto* any = segment(0, begin);
        const auto st = node_stats(n, [any, y](std::size_t i) { return y[any[i]]; });
        std::optional<Split> best;
        for (auto var : candidates_) {
            const auto* rows = segment(var, begin);
            const double* x = cols_.column(var);
            scan_sorted_column(
                var, n, [rows, x](std::size_t i) { return x[rows[i]]; },
                [rows, y](std::size_t i) { return y[rows[i]]; }, st, best);
        }
        return accept(best, st);
    }

    // The split column is already ordered by x, so its left child is a prefix.
    std::size_t partition(std::size_t begin, std::size_t end, const Split& split) {
        const std::size_t n = end - begin;
        const auto* split_rows = segment(split.var, begin);
        const double* x = cols_.column(split.var);
        std::size_t n_left = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto left = static_cast<char>(x[split_rows[i]] <= split.value);
            goes_left_[split_rows[i]] = left;
            n_left += static_cast<std::size_t>(left);
        }
        for (std::size_t j = 0; j < cols_.p; ++j) {
            if (j == split.var) {
                continue;
            }
            auto* seg = idx_.data() + j * m_ + begin;
            std::size_t l = 0;
            std::size_t r = 0;
            for (std::size_t i = 0; i < n; ++i) {
                // Branch-free: the side is data dependent and predicts badly.
                const auto v = seg[i];
                const std::size_t left = goes_left_[v];
                seg[l] = v;
                right_[r] = v;
                l += left;
                r += 1 - left;
            }
            std::copy_n(right_.begin(), r, seg + l);
        }
        return n_left;
    }

    // Depth-first, left subtree before right: fixes the order of RNG draws.
    std::uint32_t grow(std::size_t begin, std::size_t end) {
        if (end - begin < 2 * config_.min_node_size || constant_y(begin, end)) {
            return make_leaf(begin, end);
        }
        sample_without_replacement(rng_, cols_.p, mtry_, perm_, candidates_);
        const auto split = best_split(begin, end);
        if (!split) {
            return make_leaf(begin, end);
        }
        const std::size_t n_left = partition(begin, end, *split);
        const auto self = static_cast<std::uint32_t>(nodes_.size());
        nodes_.push_back(TreeNode{static_cast<std::int32_t>(split->var), split->value, 0, 0,
                                  static_cast<std::uint32_t>(end - begin)});
        const auto left = grow(begin, begin + n_left);
        const auto right = grow(begin + n_left, end);
        nodes_[self].left = left;
        nodes_[self].right = right;
        return self;
    }

    const SortedColumns& cols_;
    std::span<const double> y_;
    const ForestConfig& config_;
    std::size_t mtry_;
    CounterRng& rng_;
    std::size_t m_ = 0;
    std::vector<TreeNode> nodes_;
    std::vector<std::uint32_t> counts_;
    std::vector<std::uint32_t> idx_;  // p segments of m_ rows
    std::vector<char> goes_left_;
    std::vector<std::uint32_t> right_;
    std::vector<std::size_t> perm_;
    std::vector<std::size_t> candidates_;
};

inline Tree fit_tree_sorted(const ForestConfig& config, const SortedColumns& cols, std::span<const double> y,
                            std::size_t tree_index, std::vector<std::size_t>* in_bag) {
    auto rng = CounterRng::derive(config.seed, tree_index);
    std::vector<std::size_t> rows;
    if (config.bootstrap) {
        rows = bootstrap_sample(rng, y.size());
    } else {
        rows.resize(y.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            rows[i] = i;
        }
    }
    if (in_bag != nullptr) {
        *in_bag = rows;
    }
    TreeBuilder builder(cols, y, config, config.resolved_mtry(cols.p), rng);
    return builder.build(rows);
}

} // namespace detail

/// A trained ensemble. Immutable once constructed.
class Forest {
public:
    Forest(ForestConfig config, std::size_t p, std::vector<Tree> trees, double y_min, double y_max,
           std::optional<double> oob_mse = std::nullopt)
        : config_(std::move(config)), p_(p), trees_(std::move(trees)), y_min_(y_min), y_max_(y_max),
          oob_mse_(oob_mse) {
        if (trees_.size() != config_.n_trees) {
            throw DomainError("forest has " + std::to_string(trees_.size()) + " trees, config says " +
                              std::to_string(config_.n_trees));
        }
        for (const auto& t : trees_) {
            if (t.max_split_var() >= static_cast<std::int32_t>(p_)) {
                throw DomainError("tree splits on a variable outside 0.." + std::to_string(p_ - 1));
            }
        }
        if (y_max_ < y_min_) {
            throw DomainError("forest target range is reversed");
        }
    }

    [[nodiscard]] const ForestConfig& config() const noexcept { return config_; }
    [[nodiscard]] std::size_t p() const noexcept { return p_; }
    [[nodiscard]] const std::vector<Tree>& trees() const noexcept { return trees_; }
    [[nodiscard]] double y_min() const noexcept { return y_min_; }
    [[nodiscard]] double y_max() const noexcept { return y_max_; }
    /// Out-of-bag mean squared error; reported only, never used for selection.
    [[nodiscard]] std::optional<double> oob_mse() const noexcept { return oob_mse_; }

    friend bool operator==(const Forest&, const Forest&) = default;

private:
    ForestConfig config_;
    std::size_t p_;
    std::vector<Tree> trees_;
    double y_min_;
    double y_max_;
    std::optional<double> oob_mse_;
};

/// Mean of the per-tree predictions, summed in tree order.
[[nodiscard]] inline double predict(const Forest& forest, std::span<const double> x) {
    if (x.size() != forest.p()) {
        throw DomainError("predict: expected " + std::to_string(forest.p()) + " features, got " +
                          std::to_string(x.size()));
    }
    double sum = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    bool first = true;
    for (const auto& t : forest.trees()) {
        const double v = predict_tree(t, x);
        sum += v;
        lo = first ? v : std::min(lo, v);
        hi = first ? v : std::max(hi, v);
        first = false;
    }
    // The clamp only absorbs last-ulp rounding; the exact mean always lies in [lo, hi].
    return std::clamp(sum / static_cast<double>(forest.trees().size()), lo, hi);
}

/// Grows one tree from its own RNG stream: bootstrap draws first, then node draws depth-first.
[[nodiscard]] inline Tree fit_tree(const ForestConfig& config, const Matrix& X, std::span<const double> y,
                                   std::size_t tree_index, std::vector<std::size_t>* in_bag = nullptr) {
    return detail::fit_tree_sorted(config, detail::SortedColumns(X), y, tree_index, in_bag);
}

/**
 * Trains `config.n_trees` trees, optionally on several worker threads. Tree t
 * draws only from CounterRng::derive(config.seed, t), so the result is
 * bit-identical for every worker count.
 */
[[nodiscard]] inline Forest fit_forest(const ForestConfig& config, const Matrix& X, std::span<const double> y,
                                       std::size_t workers = 1) {
    if (X.rows() == 0 || X.cols() == 0) {
        throw DomainError("fit_forest: empty training data");
    }
    if (X.rows() != y.size()) {
        throw DomainError("fit_forest: X has " + std::to_string(X.rows()) + " rows but y has " +
                          std::to_string(y.size()));
    }
    for (double v : X.data()) {
        if (!std::isfinite(v)) {
            throw DomainError("fit_forest: non-finite feature value");
        }
    }
    for (double v : y) {
        if (!std::isfinite(v)) {
            throw DomainError("fit_forest: non-finite target value");
        }
    }
    config.validate(X.cols());

    const std::size_t n = y.size();
    std::vector<Tree> trees(config.n_trees);
    std::vector<std::vector<std::size_t>> in_bag(config.bootstrap ? config.n_trees : 0);
    const detail::SortedColumns sorted(X);
    parallel_for(config.n_trees, workers, [&](std::size_t t) {
        trees[t] = detail::fit_tree_sorted(config, sorted, y, t, config.bootstrap ? &in_bag[t] : nullptr);
    });

    std::optional<double> oob;
    if (config.bootstrap) {
        std::vector<double> sum(n, 0.0);
        std::vector<std::size_t> count(n, 0);
        std::vector<char> used(n);
        for (std::size_t t = 0; t < trees.size(); ++t) {
            std::fill(used.begin(), used.end(), 0);
            for (auto r : in_bag[t]) {
                used[r] = 1;
            }
            for (std::size_t r = 0; r < n; ++r) {
                if (used[r] == 0) {
                    sum[r] += predict_tree(trees[t], X.row(r));
                    ++count[r];
                }
            }
        }
        double sse = 0.0;
        std::size_t m = 0;
        for (std::size_t r = 0; r < n; ++r) {
            if (count[r] > 0) {
                const double e = y[r] - sum[r] / static_cast<double>(count[r]);
                sse += e * e;
                ++m;
            }
        }
        if (m > 0) {
            oob = sse / static_cast<double>(m);
        }
    }
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    return Forest(config, X.cols(), std::move(trees), *lo, *hi, oob);
}

} // namespace rfcast
