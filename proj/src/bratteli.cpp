#include "etale/bratteli.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace etale {

const std::string& FinitePath::vertex_at(int level) const {
    if (level < start_level_ || level > end_level()) throw error("vertex_at: level outside path");
    if (level == start_level_) return source_;
    return edges_[size_t(level - start_level_ - 1)].target;
}

FinitePath FinitePath::prefix(int n_edges) const {
    if (n_edges < 0 || n_edges > length()) throw error("prefix: bad length");
    return FinitePath(start_level_, source_,
                      std::vector<PathEdge>(edges_.begin(), edges_.begin() + n_edges));
}

FinitePath FinitePath::suffix_from(int level) const {
    if (level < start_level_ || level > end_level()) throw error("suffix_from: level outside path");
    return FinitePath(level, vertex_at(level),
                      std::vector<PathEdge>(edges_.begin() + (level - start_level_), edges_.end()));
}

FinitePath FinitePath::append(const PathEdge& e) const {
    auto es = edges_;
    es.push_back(e);
    return FinitePath(start_level_, source_, std::move(es));
}

FinitePath FinitePath::concat(const FinitePath& tail) const {
    if (tail.start_level() != end_level() || tail.source() != end_vertex())
        throw error("concat: paths do not compose");
    auto es = edges_;
    es.insert(es.end(), tail.edges_.begin(), tail.edges_.end());
    return FinitePath(start_level_, source_, std::move(es));
}

bool FinitePath::starts_with(const FinitePath& p) const {
    if (p.start_level_ != start_level_ || p.source_ != source_ || p.length() > length()) return false;
    return std::equal(p.edges_.begin(), p.edges_.end(), edges_.begin());
}

std::string FinitePath::to_string() const {
    if (edges_.empty()) {
        std::ostringstream os;
        os << "@" << start_level_ << ":" << source_;
        return os.str();
    }
    std::string s;
    std::string from = source_;
    for (size_t i = 0; i < edges_.size(); ++i) {
        if (i) s += ',';
        s += from + ">" + edges_[i].label + ">" + edges_[i].target;
        from = edges_[i].target;
    }
    return s;
}

int common_prefix_len(const FinitePath& a, const FinitePath& b) {
    if (a.start_level() != b.start_level() || a.source() != b.source()) return -1;
    int n = std::min(a.length(), b.length());
    for (int i = 0; i < n; ++i)
        if (a.edges()[i] != b.edges()[i]) return i;
    return n;
}

int common_prefix_len(const std::vector<FinitePath>& paths) {
    if (paths.empty()) return 0;
    int n = paths[0].length();
    for (size_t i = 1; i < paths.size(); ++i) {
        int c = common_prefix_len(paths[0], paths[i]);
        if (c < 0) return 0;
        n = std::min(n, c);
    }
    return n;
}

FinitePath EpPath::finite_prefix(int n_edges) const {
    if (n_edges <= pre.length()) return pre.prefix(n_edges);
    FinitePath out = pre;
    int need = n_edges - pre.length();
    int pos = 0;
    while (need-- > 0) {
        out = out.append(per.edges()[size_t(pos)]);
        pos = (pos + 1) % per.length();
    }
    return out;
}

PathEdge EpPath::edge_at(int level) const {
    int i = level - pre.start_level();
    if (i < 0) throw error("edge_at: before path start");
    if (i < pre.length()) return pre.edges()[size_t(i)];
    return per.edges()[size_t((i - pre.length()) % per.length())];
}

EpPath EpPath::suffix_from(int level) const {
    int i = level - pre.start_level();
    if (i < 0) throw error("suffix_from: before path start");
    if (i <= pre.length()) {
        if (i == pre.length())
            return EpPath{FinitePath(level, pre.end_vertex()), per};
        return EpPath{pre.suffix_from(level), per};
    }
    // inside the periodic part: rotate the period
    int k = (i - pre.length()) % per.length();
    FinitePath rot(level, per.vertex_at(per.start_level() + k));
    for (int j = 0; j < per.length(); ++j)
        rot = rot.append(per.edges()[size_t((k + j) % per.length())]);
    return EpPath{FinitePath(level, rot.source()), rot};
}

std::string EpPath::to_string() const {
    auto edges_str = [](const FinitePath& p) {
        std::string s;
        std::string from = p.source();
        for (size_t i = 0; i < p.edges().size(); ++i) {
            if (i) s += ',';
            s += from + ">" + p.edges()[i].label + ">" + p.edges()[i].target;
            from = p.edges()[i].target;
        }
        return s;
    };
    return "ep(" + edges_str(pre) + ";" + edges_str(per) + ")";
}

namespace {

std::vector<EdgeRec> parse_edge_tokens(const std::string& s) {
    std::vector<EdgeRec> out;
    std::string tok;
    std::istringstream is(s);
    while (std::getline(is, tok, ',')) {
        if (tok.empty()) continue;
        auto p1 = tok.find('>');
        auto p2 = tok.rfind('>');
        if (p1 == std::string::npos || p2 == p1) throw error("bad edge token: " + tok);
        out.push_back(EdgeRec{tok.substr(0, p1), tok.substr(p1 + 1, p2 - p1 - 1), tok.substr(p2 + 1)});
    }
    return out;
}

} // namespace

EpPath parse_ep_path(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!isspace(static_cast<unsigned char>(c))) s += c;
    if (s.size() < 4 || s.substr(0, 3) != "ep(" || s.back() != ')')
        throw error("eventually periodic path must look like ep(…;…)");
    s = s.substr(3, s.size() - 4);
    auto semi = s.find(';');
    if (semi == std::string::npos) throw error("missing ';' in ep path");
    auto pre_recs = parse_edge_tokens(s.substr(0, semi));
    auto per_recs = parse_edge_tokens(s.substr(semi + 1));
    if (per_recs.empty()) throw error("ep path needs a nonempty period");

    std::string start = pre_recs.empty() ? per_recs[0].from : pre_recs[0].from;
    FinitePath pre(0, start);
    for (const auto& r : pre_recs) {
        if (r.from != pre.end_vertex()) throw error("ep preperiod edges do not compose");
        pre = pre.append(PathEdge{r.label, r.to});
    }
    if (per_recs[0].from != pre.end_vertex()) throw error("ep period does not start at preperiod end");
    FinitePath per(pre.end_level(), pre.end_vertex());
    for (const auto& r : per_recs) {
        if (r.from != per.end_vertex()) throw error("ep period edges do not compose");
        per = per.append(PathEdge{r.label, r.to});
    }
    if (per.end_vertex() != per.source()) throw error("ep period does not close up");
    return EpPath{pre, per};
}

EpPath normalize_ep(const EpPath& p) {
    EpPath out = p;
    // shrink the period to its primitive root
    int n = out.per.length();
    for (int d = 1; d < n; ++d) {
        if (n % d != 0) continue;
        bool repeats = true;
        for (int i = d; i < n && repeats; ++i)
            if (out.per.edges()[size_t(i)] != out.per.edges()[size_t(i % d)]) repeats = false;
        if (repeats && out.per.edges()[size_t(d - 1)].target == out.per.source()) {
            out.per = out.per.prefix(d);
            n = d;
            break;
        }
    }
    // roll the cut backwards through matching edges
    while (out.pre.length() > 0) {
        PathEdge last_pre = out.pre.edges().back();
        PathEdge last_per = out.per.edges().back();
        if (last_pre != last_per) break;
        FinitePath pre2 = out.pre.prefix(out.pre.length() - 1);
        std::vector<PathEdge> rotated;
        rotated.push_back(last_per);
        for (int i = 0; i + 1 < out.per.length(); ++i) rotated.push_back(out.per.edges()[size_t(i)]);
        FinitePath per2(pre2.end_level(), pre2.end_vertex(), std::move(rotated));
        if (per2.end_vertex() != per2.source()) break; // rotation leaves the loop
        out.pre = std::move(pre2);
        out.per = std::move(per2);
    }
    return out;
}

BratteliDiagram::BratteliDiagram(int start_level,
                                 std::vector<std::vector<std::string>> levels,
                                 std::vector<std::vector<EdgeRec>> edges_per_level,
                                 std::optional<StationaryTail> tail)
    : start_level_(start_level), tail_(std::move(tail)) {
    for (auto& l : levels) levels_.push_back(std::move(l));
    for (auto& e : edges_per_level) edges_.push_back(std::move(e));
    if (edges_.size() + 1 < levels_.size()) edges_.resize(levels_.empty() ? 0 : levels_.size() - 1);
    for (auto& e : edges_)
        std::sort(e.begin(), e.end());
}

int BratteliDiagram::materialized_depth() const {
    std::lock_guard lk(mu_);
    return start_level_ + int(levels_.size()) - 1;
}

void BratteliDiagram::ensure_level(int level) const {
    std::lock_guard lk(mu_);
    materialize_locked(level);
}

void BratteliDiagram::materialize_locked(int level) const {
    while (start_level_ + int(levels_.size()) - 1 < level) {
        if (!tail_) throw error("level " + std::to_string(level) + " beyond materialized diagram");
        int cur_top = start_level_ + int(levels_.size()) - 1;
        if (cur_top < tail_->from_level)
            throw error("stationary tail starts beyond materialized levels");
        // next level's vertices: targets of the rules; keep the previous
        // level's ordering when the name sets coincide (stationary repeat)
        std::set<std::string> verts;
        for (const auto& r : tail_->rules) verts.insert(r.to);
        const auto& prev = levels_.back();
        if (std::set<std::string>(prev.begin(), prev.end()) == verts)
            levels_.push_back(prev);
        else
            levels_.emplace_back(verts.begin(), verts.end());
        auto rules = tail_->rules;
        std::sort(rules.begin(), rules.end());
        if (edges_.size() < levels_.size() - 1) edges_.resize(levels_.size() - 1);
        edges_[levels_.size() - 2] = rules;
    }
}

const std::vector<std::string>& BratteliDiagram::vertices(int level) const {
    ensure_level(level);
    std::lock_guard lk(mu_);
    int i = level - start_level_;
    if (i < 0 || i >= int(levels_.size())) throw error("vertices: level out of range");
    return levels_[size_t(i)];
}

int BratteliDiagram::vertex_index(int level, const std::string& name) const {
    const auto& vs = vertices(level);
    for (size_t i = 0; i < vs.size(); ++i)
        if (vs[i] == name) return int(i);
    return -1;
}

const std::vector<EdgeRec>& BratteliDiagram::edges_at(int level) const {
    ensure_level(level + 1);
    std::lock_guard lk(mu_);
    int i = level - start_level_;
    if (i < 0 || i >= int(edges_.size())) throw error("edges_at: level out of range");
    return edges_[size_t(i)];
}

std::vector<EdgeRec> BratteliDiagram::out_edges(int level, const std::string& v) const {
    std::vector<EdgeRec> out;
    for (const auto& e : edges_at(level))
        if (e.from == v) out.push_back(e);
    return out; // edges_at is sorted by (from,label), so this is label-sorted
}

std::optional<std::string> BratteliDiagram::edge_target(int level, const std::string& src,
                                                        const std::string& label) const {
    for (const auto& e : edges_at(level))
        if (e.from == src && e.label == label) return e.to;
    return std::nullopt;
}

bool BratteliDiagram::has_edge(int level, const std::string& src, const std::string& label,
                               const std::string& to) const {
    auto t = edge_target(level, src, label);
    return t.has_value() && *t == to;
}

Int BratteliDiagram::count_edges(int level, const std::string& from, const std::string& to) const {
    Int n = 0;
    for (const auto& e : edges_at(level))
        if (e.from == from && e.to == to) ++n;
    return n;
}

std::vector<std::string> BratteliDiagram::edge_labels(int level, const std::string& from,
                                                      const std::string& to) const {
    std::vector<std::string> out;
    for (const auto& e : edges_at(level))
        if (e.from == from && e.to == to) out.push_back(e.label);
    return out;
}

bool BratteliDiagram::path_in_diagram(const FinitePath& p) const {
    if (!reachable(p.end_level())) return false;
    if (vertex_index(p.start_level(), p.source()) < 0) return false;
    std::string cur = p.source();
    int level = p.start_level();
    for (const auto& e : p.edges()) {
        if (!has_edge(level, cur, e.label, e.target)) return false;
        cur = e.target;
        ++level;
    }
    return true;
}

bool BratteliDiagram::ep_path_in_diagram(const EpPath& p, int check_depth) const {
    if (p.per.length() == 0 || p.per.source() != p.per.end_vertex()) return false;
    if (p.per.start_level() != p.pre.end_level() || p.per.source() != p.pre.end_vertex()) return false;
    FinitePath prefix = p.finite_prefix(std::max(0, check_depth - p.pre.start_level()));
    return path_in_diagram(prefix);
}

Report validate(const BratteliDiagram& d, int depth) {
    Report rep;
    int lo = d.start_level();
    if (!d.reachable(lo)) {
        rep.push_back({"diagram", "no levels"});
        return rep;
    }
    try {
        d.ensure_level(depth);
    } catch (const error& e) {
        rep.push_back({"diagram", e.what()});
        return rep;
    }
    {
        // "no levels" also covers an empty level list materialized
        bool any = false;
        try {
            any = !d.vertices(lo).empty();
        } catch (...) {
        }
        if (!any) rep.push_back({"level " + std::to_string(lo), "no levels"});
    }
    for (int level = lo; level < depth; ++level) {
        const auto& vs = d.vertices(level);
        const auto& ws = d.vertices(level + 1);
        auto has_vertex = [](const std::vector<std::string>& set, const std::string& v) {
            return std::find(set.begin(), set.end(), v) != set.end();
        };
        std::set<std::pair<std::string, std::string>> seen;
        std::set<std::string> with_out, with_in;
        for (const auto& e : d.edges_at(level)) {
            std::string where = "level " + std::to_string(level) + " edge " + e.from + ">" + e.label + ">" + e.to;
            if (!has_vertex(vs, e.from)) rep.push_back({where, "dangling source"});
            if (!has_vertex(ws, e.to)) rep.push_back({where, "dangling target"});
            if (!seen.insert({e.from, e.label}).second)
                rep.push_back({where, "duplicate label on source vertex"});
            with_out.insert(e.from);
            with_in.insert(e.to);
        }
        for (const auto& v : vs)
            if (!with_out.count(v))
                rep.push_back({"level " + std::to_string(level) + " vertex " + v, "no outgoing edges"});
        for (const auto& w : ws)
            if (!with_in.count(w))
                rep.push_back({"level " + std::to_string(level + 1) + " vertex " + w, "no incoming edges"});
    }
    if (d.has_tail()) {
        // realizing a level twice must agree (the rule is a fixed record set)
        const auto& t = *d.tail();
        std::set<std::pair<std::string, std::string>> seen;
        for (const auto& r : t.rules)
            if (!seen.insert({r.from, r.label}).second)
                rep.push_back({"stationary tail rule " + r.from + ">" + r.label, "duplicate label"});
    }
    return rep;
}

Mat incidence_matrix(const BratteliDiagram& d, int level) {
    if (!d.reachable(level + 1)) throw error("incidence_matrix: level out of range");
    const auto& src = d.vertices(level);
    const auto& dst = d.vertices(level + 1);
    Mat m(int(dst.size()), int(src.size()));
    for (const auto& e : d.edges_at(level)) {
        int r = -1, c = -1;
        for (size_t i = 0; i < dst.size(); ++i)
            if (dst[i] == e.to) r = int(i);
        for (size_t j = 0; j < src.size(); ++j)
            if (src[j] == e.from) c = int(j);
        if (r >= 0 && c >= 0) m.at(r, c) += 1;
    }
    return m;
}

std::vector<FinitePath> enumerate_paths(const BratteliDiagram& d, int from_level, int to_level,
                                        const std::optional<FinitePath>& prefix) {
    if (from_level > to_level) throw error("enumerate_paths: from_level > to_level");
    if (!d.reachable(to_level)) throw error("enumerate_paths: to_level out of reach");
    std::vector<FinitePath> frontier;
    if (prefix) {
        if (!d.path_in_diagram(*prefix)) throw error("enumerate_paths: prefix not a path in the diagram");
        if (prefix->start_level() != from_level) throw error("enumerate_paths: prefix starts at wrong level");
        frontier.push_back(*prefix);
    } else {
        for (const auto& v : d.vertices(from_level)) frontier.emplace_back(from_level, v);
    }
    while (!frontier.empty() && frontier.front().end_level() < to_level) {
        std::vector<FinitePath> next;
        for (const auto& p : frontier)
            for (const auto& e : d.out_edges(p.end_level(), p.end_vertex()))
                next.push_back(p.append(PathEdge{e.label, e.to}));
        frontier = std::move(next);
    }
    std::sort(frontier.begin(), frontier.end());
    return frontier;
}

BratteliDiagram truncate(const BratteliDiagram& d, int k0, int depth_hint) {
    if (k0 < d.start_level()) throw error("truncate: k0 before start level");
    int top = depth_hint >= 0 ? depth_hint : std::max(d.materialized_depth(), k0);
    d.ensure_level(top);
    std::vector<std::vector<std::string>> levels;
    std::vector<std::vector<EdgeRec>> edges;
    for (int l = k0; l <= top; ++l) levels.push_back(d.vertices(l));
    for (int l = k0; l < top; ++l) edges.push_back(d.edges_at(l));
    std::optional<StationaryTail> tail;
    if (d.has_tail()) tail = StationaryTail{std::max(d.tail()->from_level, k0), d.tail()->rules};
    return BratteliDiagram(k0, std::move(levels), std::move(edges), std::move(tail));
}

FinitePath truncate_path(const FinitePath& p, int k0) {
    if (k0 < p.start_level() || k0 > p.end_level()) throw error("truncate_path: k0 outside path");
    return p.suffix_from(k0);
}

EpPath truncate_ep_path(const EpPath& p, int k0) { return p.suffix_from(k0); }

std::string to_dot(const BratteliDiagram& d, int depth) {
    d.ensure_level(depth);
    std::ostringstream os;
    os << "digraph bratteli {\n  rankdir=TB;\n  node [shape=circle];\n";
    for (int l = d.start_level(); l <= depth; ++l) {
        os << "  { rank=same;";
        for (const auto& v : d.vertices(l)) os << " \"L" << l << ":" << v << "\";";
        os << " }\n";
    }
    for (int l = d.start_level(); l < depth; ++l)
        for (const auto& e : d.edges_at(l))
            os << "  \"L" << l << ":" << e.from << "\" -> \"L" << l + 1 << ":" << e.to
               << "\" [label=\"" << e.label << "\"];\n";
    os << "}\n";
    return os.str();
}

bool check_simplicity(const BratteliDiagram& d, int window, int depth) {
    if (window < 1) throw error("check_simplicity: window must be >= 1");
    d.ensure_level(depth);
    auto all_positive = [](const Mat& m) {
        for (int r = 0; r < m.rows(); ++r)
            for (int c = 0; c < m.cols(); ++c)
                if (m.at(r, c) <= 0) return false;
        return true;
    };
    int l = d.start_level();
    while (l < depth) {
        Mat acc = incidence_matrix(d, l);
        int k = 1;
        while (!all_positive(acc)) {
            if (k >= window || l + k >= depth) return false;
            acc = incidence_matrix(d, l + k) * acc;
            ++k;
        }
        l += k;
    }
    return true;
}

} // namespace etale
