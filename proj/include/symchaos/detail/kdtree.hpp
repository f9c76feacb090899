#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

namespace symchaos::detail {

/// Static k-d tree over a row-major block of points, used for exact
/// nearest-neighbour queries with a temporal exclusion window.
///
/// Ties on distance resolve to the lowest point index, so results do not
/// depend on the tree layout.
class KdTree {
public:
    struct Neighbor {
        std::size_t index = npos;
        double dist2 = std::numeric_limits<double>::infinity();
        [[nodiscard]] bool found() const noexcept { return index != npos; }
    };

    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    KdTree(std::span<const double> data, std::size_t dim, std::size_t count)
        : data_(data), dim_(dim), order_(count) {
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        nodes_.reserve(2 * count / kLeafSize + 2);
        if (count > 0) build(0, count);
    }

    /// Nearest point to `query` among indices j with |j - self| >= min_sep.
    /// Pass self = npos to disable the exclusion window.
    [[nodiscard]] Neighbor nearest(std::span<const double> query, std::size_t self,
                                   std::size_t min_sep) const {
        Neighbor best;
        if (!nodes_.empty()) search(0, query, self, min_sep, best);
        return best;
    }

private:
    static constexpr std::size_t kLeafSize = 8;

    struct Node {
        std::size_t begin = 0, end = 0;  // range into order_
        std::size_t left = 0, right = 0; // child node ids; 0 for leaves
        std::size_t axis = 0;
        double split = 0.0;
        bool leaf = true;
    };

    [[nodiscard]] double coord(std::size_t point, std::size_t axis) const {
        return data_[point * dim_ + axis];
    }

    std::size_t build(std::size_t begin, std::size_t end) {
        const std::size_t id = nodes_.size();
        nodes_.push_back(Node{begin, end});
        if (end - begin <= kLeafSize) return id;

        std::size_t axis = 0;
        double widest = -1.0;
        for (std::size_t a = 0; a < dim_; ++a) {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (std::size_t k = begin; k < end; ++k) {
                const double v = coord(order_[k], a);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (hi - lo > widest) {
                widest = hi - lo;
                axis = a;
            }
        }
        if (widest <= 0.0) return id;  // all points coincide; keep as a leaf

        const std::size_t mid = begin + (end - begin) / 2;
        std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                         order_.begin() + static_cast<std::ptrdiff_t>(mid),
                         order_.begin() + static_cast<std::ptrdiff_t>(end),
                         [&](std::size_t a, std::size_t b) { return coord(a, axis) < coord(b, axis); });
        const double split = coord(order_[mid], axis);

        const std::size_t left = build(begin, mid);
        const std::size_t right = build(mid, end);
        Node& node = nodes_[id];
        node.leaf = false;
        node.axis = axis;
        node.split = split;
        node.left = left;
        node.right = right;
        return id;
    }

    void search(std::size_t id, std::span<const double> query, std::size_t self,
                std::size_t min_sep, Neighbor& best) const {
        const Node& node = nodes_[id];
        if (node.leaf) {
            for (std::size_t k = node.begin; k < node.end; ++k) {
                const std::size_t j = order_[k];
                if (self != npos && (j > self ? j - self : self - j) < min_sep) continue;
                double d2 = 0.0;
                for (std::size_t a = 0; a < dim_; ++a) {
                    const double diff = coord(j, a) - query[a];
                    d2 += diff * diff;
                }
                if (d2 < best.dist2 || (d2 == best.dist2 && j < best.index)) {
                    best.dist2 = d2;
                    best.index = j;
                }
            }
            return;
        }
        const double diff = query[node.axis] - node.split;
        const std::size_t near = diff < 0.0 ? node.left : node.right;
        const std::size_t far = diff < 0.0 ? node.right : node.left;
        search(near, query, self, min_sep, best);
        // Equal-distance candidates on the far side can still win the index tie-break.
        if (diff * diff <= best.dist2) search(far, query, self, min_sep, best);
    }

    std::span<const double> data_;
    std::size_t dim_;
    std::vector<std::size_t> order_;
    std::vector<Node> nodes_;
};

}  // namespace symchaos::detail
