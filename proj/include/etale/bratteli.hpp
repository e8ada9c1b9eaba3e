#pragma once
// Graded multigraphs with labelled edges, finite and eventually periodic
// paths, truncation, incidence matrices.
//
// An edge is identified by (level, source vertex, label); labels name
// parallel edges and must be unique per (level, source). Infinite diagrams
// are represented by an optional stationary tail rule; levels are
// materialized on demand up to a caller-supplied depth. All values are
// immutable after construction up to that internal (synchronized)
// materialization, so they are safe to share across threads.

#include "etale/ints.hpp"
#include "etale/matrix.hpp"

#include <compare>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace etale {

struct PathEdge {
    std::string label;
    std::string target;
    auto operator<=>(const PathEdge&) const = default;
};

/// A finite path: start level, source vertex, and a run of composable edges.
/// A path of length 0 is a bare vertex.
class FinitePath {
public:
    FinitePath() : start_level_(0) {}
    FinitePath(int start_level, std::string source, std::vector<PathEdge> edges = {})
        : start_level_(start_level), source_(std::move(source)), edges_(std::move(edges)) {}

    int start_level() const { return start_level_; }
    const std::string& source() const { return source_; }
    const std::vector<PathEdge>& edges() const { return edges_; }
    int length() const { return int(edges_.size()); }
    int end_level() const { return start_level_ + length(); }
    const std::string& end_vertex() const { return edges_.empty() ? source_ : edges_.back().target; }
    const std::string& vertex_at(int level) const; // start_level <= level <= end_level

    FinitePath prefix(int n_edges) const;
    FinitePath suffix_from(int level) const; // drop edges before `level`
    FinitePath append(const PathEdge& e) const;
    FinitePath concat(const FinitePath& tail) const; // tail.start == end_level, tail.source == end_vertex
    bool starts_with(const FinitePath& p) const;

    auto operator<=>(const FinitePath& o) const {
        if (auto c = start_level_ <=> o.start_level_; c != 0) return c;
        if (auto c = source_ <=> o.source_; c != 0) return c;
        return edges_ <=> o.edges_;
    }
    bool operator==(const FinitePath&) const = default;

    std::string to_string() const; // comma-joined from>label>to tokens; bare "@ℓ:v" for length 0

private:
    int start_level_;
    std::string source_;
    std::vector<PathEdge> edges_;
};

int common_prefix_len(const FinitePath& a, const FinitePath& b);
int common_prefix_len(const std::vector<FinitePath>& paths);

/// An eventually periodic point of the infinite path space: preperiod
/// followed by a repeating period. The period must close up (end vertex =
/// start vertex) and, when repeated, stay inside the diagram.
struct EpPath {
    FinitePath pre;
    FinitePath per; // nonempty

    int period_len() const { return per.length(); }
    FinitePath finite_prefix(int n_edges) const;
    PathEdge edge_at(int level) const; // edge leaving `level`
    EpPath suffix_from(int level) const;
    std::string to_string() const; // ep(pre;per)
    bool operator==(const EpPath&) const = default;
};

EpPath parse_ep_path(const std::string& text);

/// Canonical form: primitive period, cut as early as possible.
EpPath normalize_ep(const EpPath& p);

struct EdgeRec {
    std::string from;
    std::string label;
    std::string to;
    auto operator<=>(const EdgeRec&) const = default;
};

struct StationaryTail {
    int from_level = 0;                 // levels > from_level are produced by the rules
    std::vector<EdgeRec> rules;         // applied verbatim at every deeper level
};

class BratteliDiagram {
public:
    BratteliDiagram(int start_level,
                    std::vector<std::vector<std::string>> levels,
                    std::vector<std::vector<EdgeRec>> edges_per_level,
                    std::optional<StationaryTail> tail = std::nullopt);

    int start_level() const { return start_level_; }
    bool has_tail() const { return tail_.has_value(); }
    const std::optional<StationaryTail>& tail() const { return tail_; }
    int materialized_depth() const;

    // Extends the diagram through `level` using the tail rule. Throws if the
    // level is out of reach (no tail).
    void ensure_level(int level) const;
    bool reachable(int level) const { return tail_.has_value() || level <= materialized_depth(); }

    const std::vector<std::string>& vertices(int level) const;
    int vertex_index(int level, const std::string& name) const; // -1 if absent
    const std::vector<EdgeRec>& edges_at(int level) const;      // raw records level -> level+1

    // Sorted by label; empty if the vertex has none.
    std::vector<EdgeRec> out_edges(int level, const std::string& v) const;
    std::optional<std::string> edge_target(int level, const std::string& src, const std::string& label) const;
    bool has_edge(int level, const std::string& src, const std::string& label, const std::string& to) const;
    Int count_edges(int level, const std::string& from, const std::string& to) const;
    std::vector<std::string> edge_labels(int level, const std::string& from, const std::string& to) const;

    bool path_in_diagram(const FinitePath& p) const;
    bool ep_path_in_diagram(const EpPath& p, int check_depth) const;

private:
    int start_level_;
    std::optional<StationaryTail> tail_;
    mutable std::mutex mu_;
    // deques: lazy growth must not invalidate references handed out earlier
    mutable std::deque<std::vector<std::string>> levels_;
    mutable std::deque<std::vector<EdgeRec>> edges_;
    void materialize_locked(int level) const;
};

using DiagramPtr = std::shared_ptr<const BratteliDiagram>;

Report validate(const BratteliDiagram& d, int depth);

/// Incidence matrix at `level`: rows indexed by the vertices of level+1
/// (targets), columns by the vertices of `level`. Entry = edge multiplicity.
Mat incidence_matrix(const BratteliDiagram& d, int level);

std::vector<FinitePath> enumerate_paths(const BratteliDiagram& d, int from_level, int to_level,
                                        const std::optional<FinitePath>& prefix = std::nullopt);

BratteliDiagram truncate(const BratteliDiagram& d, int k0, int depth_hint = -1);
FinitePath truncate_path(const FinitePath& p, int k0);
EpPath truncate_ep_path(const EpPath& p, int k0);

std::string to_dot(const BratteliDiagram& d, int depth);

/// Simplicity heuristic: within windows of at most `window` consecutive
/// levels, telescoped incidence products must become strictly positive.
bool check_simplicity(const BratteliDiagram& d, int window, int depth);

} // namespace etale
