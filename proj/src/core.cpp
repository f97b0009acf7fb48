#include "flockpp/core.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>
#include <optional>
#include <ranges>

namespace flockpp {

CapExceeded::CapExceeded(std::size_t cap)
    : std::runtime_error("reachability graph exceeds node cap of " + std::to_string(cap)),
      cap_(cap) {}

Protocol::Protocol(std::string name, std::vector<std::string> state_names, StateId q_init,
                   const std::vector<StateId>& q1_states, bool deterministic)
    : name_(std::move(name)),
      names_(std::move(state_names)),
      q_init_(q_init),
      q1_(names_.size(), false),
      deterministic_(deterministic) {
    if (names_.empty()) throw ProtocolError("protocol needs at least one state");
    if (names_.size() > std::numeric_limits<std::uint16_t>::max())
        throw ProtocolError("too many states");
    if (q_init.index >= names_.size()) throw ProtocolError("initial state out of range");
    for (StateId q : q1_states) q1_.at(q.index) = true;
    const std::size_t n = names_.size();
    delta_.resize(n * n);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            delta_[a * n + b] = {StatePair{StateId{static_cast<std::uint16_t>(a)},
                                           StateId{static_cast<std::uint16_t>(b)}}};
        }
    }
}

std::optional<StateId> Protocol::find_state(std::string_view name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return StateId{static_cast<std::uint16_t>(it - names_.begin())};
}

StateId Protocol::state(std::string_view name) const {
    if (auto q = find_state(name)) return *q;
    throw ProtocolError("unknown state '" + std::string(name) + "'");
}

std::vector<StateId> Protocol::q1_states() const {
    std::vector<StateId> out;
    for (std::size_t i = 0; i < q1_.size(); ++i)
        if (q1_[i]) out.push_back(StateId{static_cast<std::uint16_t>(i)});
    return out;
}

void Protocol::set_transition(StateId a, StateId b, std::vector<StatePair> outcomes) {
    for (const auto& o : outcomes) {
        if (o.first.index >= num_states() || o.second.index >= num_states())
            throw ProtocolError("transition outcome refers to unknown state");
    }
    std::sort(outcomes.begin(), outcomes.end());
    outcomes.erase(std::unique(outcomes.begin(), outcomes.end()), outcomes.end());
    delta_.at(slot(a, b)) = std::move(outcomes);
}

void Protocol::set_symmetric(StateId a, StateId b, StatePair out) {
    set_transition(a, b, {out});
    if (a != b) set_transition(b, a, {out.swapped()});
}

bool Protocol::is_identity(StateId a, StateId b) const {
    const auto& outs = delta(a, b);
    return outs.size() == 1 && outs.front() == StatePair{a, b};
}

void Protocol::validate() const {
    const std::size_t n = names_.size();
    if (n == 0) throw ProtocolError("protocol needs at least one state");
    std::vector<std::string> sorted = names_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw ProtocolError("duplicate state name");
    if (q_init_.index >= n) throw ProtocolError("initial state out of range");
    if (delta_.size() != n * n) throw ProtocolError("transition table has wrong size");
    for (std::size_t i = 0; i < delta_.size(); ++i) {
        const auto& outs = delta_[i];
        if (outs.empty())
            throw ProtocolError("transition relation is not total at (" + names_[i / n] + ", " +
                                names_[i % n] + ")");
        if (deterministic_ && outs.size() != 1)
            throw ProtocolError("protocol declared deterministic but (" + names_[i / n] + ", " +
                                names_[i % n] + ") has several outcomes");
    }
}

bool operator==(const Protocol& lhs, const Protocol& rhs) {
    return lhs.name_ == rhs.name_ && lhs.names_ == rhs.names_ && lhs.q_init_ == rhs.q_init_ &&
           lhs.q1_ == rhs.q1_ && lhs.deterministic_ == rhs.deterministic_ &&
           lhs.delta_ == rhs.delta_;
}

Configuration Configuration::initial(const Protocol& p, Count n) {
    std::vector<Count> counts(p.num_states(), 0);
    counts[p.q_init().index] = n;
    return Configuration(std::move(counts));
}

Configuration Configuration::from_pairs(
    const Protocol& p, std::initializer_list<std::pair<std::string_view, Count>> pairs) {
    std::vector<Count> counts(p.num_states(), 0);
    for (const auto& [name, count] : pairs) counts[p.state(name).index] += count;
    return Configuration(std::move(counts));
}

std::size_t Configuration::population() const noexcept {
    return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0});
}

std::vector<std::pair<StateId, Count>> Configuration::canonical() const {
    std::vector<std::pair<StateId, Count>> out;
    for (std::size_t i = 0; i < counts_.size(); ++i)
        if (counts_[i] > 0) out.emplace_back(StateId{static_cast<std::uint16_t>(i)}, counts_[i]);
    return out;
}

std::string Configuration::to_string(const Protocol& p) const {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (const auto& [q, count] : canonical()) {
        if (!first) os << ", ";
        first = false;
        os << p.state_name(q) << ':' << count;
    }
    os << '}';
    return os.str();
}

namespace {

std::size_t hash_counts(std::span<const Count> counts) noexcept {
    // FNV-1a over the raw counts.
    std::size_t h = 1469598103934665603ull;
    for (Count c : counts) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t mix(std::uint64_t h) noexcept {
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdull;
    h ^= h >> 33;
    h *= 0xc4ceb9fe1a85ec53ull;
    h ^= h >> 33;
    return h;
}

// Open-addressing set of node ids. Each slot packs a 32-bit hash tag with
// the id, so most probes never touch the stored rows.
class NodeIndex {
public:
    NodeIndex() : slots_(1024, kEmpty), mask_(1023) {}

    template <class Eq>
    std::optional<std::uint32_t> find(std::uint64_t h, Eq&& eq) const {
        const auto tag = static_cast<std::uint32_t>(h >> 32);
        for (std::size_t s = h & mask_;; s = (s + 1) & mask_) {
            const std::uint64_t e = slots_[s];
            if (e == kEmpty) return std::nullopt;
            const auto id = static_cast<std::uint32_t>(e);
            if (static_cast<std::uint32_t>(e >> 32) == tag && eq(id)) return id;
        }
    }

    // hash_of(id) recomputes the hash of an already inserted id.
    template <class HashOf>
    void insert(std::uint32_t id, std::uint64_t h, HashOf&& hash_of) {
        if (2 * (++size_) > slots_.size()) {
            std::vector<std::uint64_t> old(slots_.size() * 2, kEmpty);
            old.swap(slots_);
            mask_ = slots_.size() - 1;
            for (std::uint64_t e : old)
                if (e != kEmpty) {
                    const auto other = static_cast<std::uint32_t>(e);
                    place(other, hash_of(other));
                }
        }
        place(id, h);
    }

    void prefetch(std::uint64_t h) const { __builtin_prefetch(&slots_[h & mask_]); }

private:
    static constexpr std::uint64_t kEmpty = std::numeric_limits<std::uint64_t>::max();

    void place(std::uint32_t id, std::uint64_t h) {
        std::size_t s = h & mask_;
        while (slots_[s] != kEmpty) s = (s + 1) & mask_;
        slots_[s] = (h >> 32 << 32) | id;
    }

    std::vector<std::uint64_t> slots_;
    std::size_t mask_;
    std::size_t size_ = 0;
};

// Applies outcome o of encounter (a, b) to counts in place.
void apply(std::span<Count> counts, StateId a, StateId b, StatePair o) {
    --counts[a.index];
    --counts[b.index];
    ++counts[o.first.index];
    ++counts[o.second.index];
}

// Calls fn(a, b) for every ordered state pair enabled in counts.
template <typename Fn>
void for_each_enabled_pair(std::span<const Count> counts, Fn&& fn) {
    const auto n = static_cast<std::uint16_t>(counts.size());
    for (std::uint16_t a = 0; a < n; ++a) {
        if (counts[a] == 0) continue;
        for (std::uint16_t b = 0; b < n; ++b) {
            if (counts[b] == 0 || (a == b && counts[a] < 2)) continue;
            fn(StateId{a}, StateId{b});
        }
    }
}

}  // namespace

std::size_t ConfigurationHash::operator()(const Configuration& c) const noexcept {
    return hash_counts(c.counts());
}

std::vector<Configuration> successors(const Protocol& p, const Configuration& c) {
    std::vector<Configuration> out;
    for_each_enabled_pair(c.counts(), [&](StateId a, StateId b) {
        for (const StatePair& o : p.delta(a, b)) {
            std::vector<Count> next(c.counts().begin(), c.counts().end());
            apply(next, a, b, o);
            out.emplace_back(std::move(next));
        }
    });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Configuration ReachGraph::node(std::size_t node) const {
    auto c = counts(node);
    return Configuration(std::vector<Count>(c.begin(), c.end()));
}

std::optional<std::size_t> ReachGraph::find(const Configuration& c) const {
    if (c.num_states() != num_states_) return std::nullopt;
    for (std::size_t i = 0; i < size(); ++i) {
        if (std::ranges::equal(counts(i), c.counts())) return i;
    }
    return std::nullopt;
}

std::vector<Configuration> ReachGraph::path_to(std::size_t node) const {
    std::vector<Configuration> path;
    for (std::size_t cur = node;; cur = parent_.at(cur)) {
        path.push_back(this->node(cur));
        if (cur == root()) break;
    }
    std::reverse(path.begin(), path.end());
    return path;
}

std::vector<std::size_t> ReachGraph::bottom_sccs() const {
    std::vector<std::size_t> out;
    for (std::size_t s = 0; s < bottom_.size(); ++s)
        if (bottom_[s]) out.push_back(s);
    return out;
}

void ReachGraph::compute_sccs() {
    // Iterative Tarjan; the graph can hold millions of nodes.
    constexpr std::uint32_t kUnvisited = std::numeric_limits<std::uint32_t>::max();
    const std::size_t n = size();
    std::vector<std::uint32_t> index(n, kUnvisited);
    std::vector<std::uint32_t> low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::uint32_t> stack;
    struct Frame {
        std::uint32_t node;
        std::uint32_t next_edge;
    };
    std::vector<Frame> call;
    scc_.assign(n, 0);
    std::uint32_t next_index = 0;
    std::uint32_t next_scc = 0;

    for (std::uint32_t start = 0; start < n; ++start) {
        if (index[start] != kUnvisited) continue;
        call.push_back({start, offsets_[start]});
        index[start] = low[start] = next_index++;
        stack.push_back(start);
        on_stack[start] = true;
        while (!call.empty()) {
            Frame& f = call.back();
            const std::uint32_t v = f.node;
            if (f.next_edge < offsets_[v + 1]) {
                const std::uint32_t w = targets_[f.next_edge++];
                if (index[w] == kUnvisited) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, offsets_[w]});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                std::uint32_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    scc_[w] = next_scc;
                } while (w != v);
                ++next_scc;
            }
            call.pop_back();
            if (!call.empty()) {
                const std::uint32_t u = call.back().node;
                low[u] = std::min(low[u], low[v]);
            }
        }
    }

    bottom_.assign(next_scc, true);
    for (std::size_t v = 0; v < n; ++v) {
        for (std::uint32_t w : successors(v)) {
            if (scc_[w] != scc_[v]) bottom_[scc_[v]] = false;
        }
    }
}

ReachGraph reach(const Protocol& p, std::size_t n, std::size_t node_cap) {
    if (n < 1 || n > std::numeric_limits<Count>::max())
        throw std::invalid_argument("population size must be in [1, 65535]");
    if (node_cap < 1) throw std::invalid_argument("node cap must be positive");
    const std::size_t q = p.num_states();
    constexpr std::size_t kRows = ReachGraph::kRowsPerBlock;

    ReachGraph g;
    g.num_states_ = q;
    g.population_ = n;

    auto& blocks = g.blocks_;
    auto row = [&blocks, q](std::uint32_t i) {
        return std::span<Count>(blocks[i / kRows].data() + (i % kRows) * q, q);
    };
    auto hash_of = [&row](std::uint32_t i) { return mix(hash_counts(row(i))); };

    // (b, a) can be skipped when it yields the same multisets as (a, b).
    auto unordered = [&p](StateId a, StateId b) {
        std::vector<StatePair> outs;
        for (StatePair o : p.delta(a, b))
            outs.push_back(o.second < o.first ? o.swapped() : o);
        std::sort(outs.begin(), outs.end());
        outs.erase(std::unique(outs.begin(), outs.end()), outs.end());
        return outs;
    };
    std::vector<char> mirrored(q * q, 0);
    for (std::uint16_t a = 0; a < q; ++a)
        for (std::uint16_t b = 0; b < a; ++b)
            mirrored[a * q + b] = unordered(StateId{a}, StateId{b}) == unordered(StateId{b}, StateId{a});

    {
        NodeIndex index;
        blocks.emplace_back(kRows * q, 0);
        row(0)[p.q_init().index] = static_cast<Count>(n);
        index.insert(0, hash_of(0), hash_of);
        g.parent_.push_back(0);

        std::vector<Count> current(q);
        std::vector<Count> batch;
        std::vector<std::uint64_t> hashes;
        std::vector<std::uint32_t> out;
        for (std::uint32_t v = 0; v < g.parent_.size(); ++v) {
            std::ranges::copy(row(v), current.begin());
            out.clear();
            batch.clear();
            hashes.clear();
            // Generate and hash every candidate first so the index probes can
            // be prefetched.
            for_each_enabled_pair(std::span<const Count>(current), [&](StateId a, StateId b) {
                if (mirrored[a.index * q + b.index]) return;
                for (const StatePair& o : p.delta(a, b)) {
                    if ((o.first == a && o.second == b) || (o.first == b && o.second == a)) {
                        out.push_back(v);
                        continue;
                    }
                    const std::size_t at = batch.size();
                    batch.insert(batch.end(), current.begin(), current.end());
                    std::span<Count> next(batch.data() + at, q);
                    apply(next, a, b, o);
                    hashes.push_back(mix(hash_counts(next)));
                    index.prefetch(hashes.back());
                }
            });
            for (std::size_t i = 0; i < hashes.size(); ++i) {
                const std::span<const Count> cand(batch.data() + i * q, q);
                const auto found = index.find(
                    hashes[i], [&](std::uint32_t j) { return std::ranges::equal(row(j), cand); });
                if (found) {
                    out.push_back(*found);
                    continue;
                }
                if (g.parent_.size() >= node_cap) throw CapExceeded(node_cap);
                const auto id = static_cast<std::uint32_t>(g.parent_.size());
                if (id / kRows == blocks.size()) blocks.emplace_back(kRows * q, 0);
                std::ranges::copy(cand, row(id).begin());
                index.insert(id, hashes[i], hash_of);
                g.parent_.push_back(v);
                out.push_back(id);
            }
            std::sort(out.begin(), out.end());
            out.erase(std::unique(out.begin(), out.end()), out.end());
            g.targets_.append(out.data(), out.size());
            if (g.targets_.size() > std::numeric_limits<std::uint32_t>::max())
                throw CapExceeded(node_cap);
            g.offsets_.push_back(static_cast<std::uint32_t>(g.targets_.size()));
        }
    }

    g.targets_.shrink_to_fit();
    g.parent_.shrink_to_fit();
    g.offsets_.shrink_to_fit();
    g.compute_sccs();
    return g;
}

std::vector<StateId> occurring_states(const ReachGraph& g) {
    std::vector<bool> seen(g.num_states(), false);
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto c = g.counts(i);
        for (std::size_t s = 0; s < c.size(); ++s)
            if (c[s] > 0) seen[s] = true;
    }
    std::vector<StateId> out;
    for (std::size_t s = 0; s < seen.size(); ++s)
        if (seen[s]) out.push_back(StateId{static_cast<std::uint16_t>(s)});
    return out;
}

std::vector<bool> can_reach_predicate(const ReachGraph& g, const ConfigPredicate& good) {
    // SCC ids come out of Tarjan in reverse topological order, so every edge
    // leaving an SCC points to a smaller id.
    const std::size_t n = g.size();
    const std::size_t k = g.num_sccs();
    std::vector<std::uint32_t> start(k + 1, 0);
    for (std::size_t v = 0; v < n; ++v) ++start[g.scc_of(v) + 1];
    std::partial_sum(start.begin(), start.end(), start.begin());
    std::vector<std::uint32_t> members(n);
    {
        std::vector<std::uint32_t> fill(start.begin(), start.end() - 1);
        for (std::size_t v = 0; v < n; ++v)
            members[fill[g.scc_of(v)]++] = static_cast<std::uint32_t>(v);
    }
    std::vector<bool> scc_good(k, false);
    for (std::size_t s = 0; s < k; ++s) {
        bool ok = false;
        for (std::uint32_t i = start[s]; i < start[s + 1] && !ok; ++i) {
            const std::uint32_t v = members[i];
            if (good(g.counts(v))) ok = true;
            for (std::uint32_t w : g.successors(v))
                if (scc_good[g.scc_of(w)]) ok = true;
        }
        scc_good[s] = ok;
    }
    std::vector<bool> mark(n);
    for (std::size_t v = 0; v < n; ++v) mark[v] = scc_good[g.scc_of(v)];
    return mark;
}

}  // namespace flockpp
