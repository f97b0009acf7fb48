#pragma once

#include <algorithm>
#include <compare>
#include <cstdlib>
#include <memory>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

namespace flockpp {

/// Agent count per state. Populations are limited to 65535 agents, far beyond
/// what exhaustive exploration can handle anyway.
using Count = std::uint16_t;

inline constexpr std::size_t kDefaultNodeCap = 5'000'000;

struct StateId {
    std::uint16_t index = 0;

    friend constexpr auto operator<=>(StateId, StateId) = default;
};

/// Ordered (initiator, responder) pair of states.
struct StatePair {
    StateId first;
    StateId second;

    constexpr StatePair swapped() const noexcept { return {second, first}; }
    friend constexpr auto operator<=>(const StatePair&, const StatePair&) = default;
};

class CapExceeded : public std::runtime_error {
public:
    explicit CapExceeded(std::size_t cap);
    std::size_t cap() const noexcept { return cap_; }

private:
    std::size_t cap_;
};

/// Malformed protocol description (bad JSON, unknown states, non-total delta, ...).
class ProtocolError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A population protocol: states, initial state, the 1-output states and a
/// total transition relation over ordered state pairs.
///
/// The transition table is dense. Pairs never set explicitly map to the
/// identity pair, so a freshly constructed protocol is already total.
class Protocol {
public:
    Protocol() = default;
    Protocol(std::string name, std::vector<std::string> state_names, StateId q_init,
             const std::vector<StateId>& q1_states, bool deterministic = true);

    const std::string& name() const noexcept { return name_; }
    void set_name(std::string name) { name_ = std::move(name); }

    std::size_t num_states() const noexcept { return names_.size(); }
    const std::string& state_name(StateId q) const { return names_.at(q.index); }
    const std::vector<std::string>& state_names() const noexcept { return names_; }
    std::optional<StateId> find_state(std::string_view name) const;
    /// Like find_state but throws ProtocolError on unknown names.
    StateId state(std::string_view name) const;

    StateId q_init() const noexcept { return q_init_; }
    bool is_q1(StateId q) const { return q1_.at(q.index); }
    std::vector<StateId> q1_states() const;

    /// Declared determinism flag; validate() checks it against the table.
    bool deterministic() const noexcept { return deterministic_; }
    void set_deterministic(bool value) noexcept { deterministic_ = value; }

    const std::vector<StatePair>& delta(StateId a, StateId b) const {
        return delta_.at(slot(a, b));
    }
    /// Outcomes are stored sorted and deduplicated.
    void set_transition(StateId a, StateId b, std::vector<StatePair> outcomes);
    /// Sets (a, b) -> out and (b, a) -> swapped(out).
    void set_symmetric(StateId a, StateId b, StatePair out);
    bool is_identity(StateId a, StateId b) const;

    /// Threshold d the protocol was constructed for, when known.
    std::optional<std::uint64_t> threshold() const noexcept { return threshold_; }
    void set_threshold(std::optional<std::uint64_t> d) noexcept { threshold_ = d; }

    /// Throws ProtocolError when a structural invariant is violated.
    void validate() const;

    /// Compares everything except the threshold annotation.
    friend bool operator==(const Protocol& lhs, const Protocol& rhs);

private:
    std::size_t slot(StateId a, StateId b) const {
        return static_cast<std::size_t>(a.index) * names_.size() + b.index;
    }

    std::string name_;
    std::vector<std::string> names_;
    StateId q_init_{};
    std::vector<bool> q1_;
    bool deterministic_ = true;
    std::vector<std::vector<StatePair>> delta_;
    std::optional<std::uint64_t> threshold_;
};

/// Multiset of agent states. Stored densely (one count per protocol state);
/// equality on the dense vector coincides with equality of the canonical
/// sparse form.
class Configuration {
public:
    Configuration() = default;
    explicit Configuration(std::vector<Count> counts) : counts_(std::move(counts)) {}

    static Configuration initial(const Protocol& p, Count n);
    /// Builds a configuration from (state, count) pairs; repeated states accumulate.
    static Configuration from_pairs(const Protocol& p,
                                    std::initializer_list<std::pair<std::string_view, Count>> pairs);

    Count count(StateId q) const { return counts_.at(q.index); }
    bool contains(StateId q) const { return count(q) > 0; }
    std::size_t population() const noexcept;
    std::size_t num_states() const noexcept { return counts_.size(); }
    std::span<const Count> counts() const noexcept { return counts_; }

    /// Sorted (state, count) pairs with zero counts removed.
    std::vector<std::pair<StateId, Count>> canonical() const;
    /// e.g. "{NB(2):1, B(0):1}" in state-index order.
    std::string to_string(const Protocol& p) const;

    friend bool operator==(const Configuration&, const Configuration&) = default;
    friend auto operator<=>(const Configuration& lhs, const Configuration& rhs) {
        return lhs.counts_ <=> rhs.counts_;
    }

private:
    std::vector<Count> counts_;
};

struct ConfigurationHash {
    std::size_t operator()(const Configuration& c) const noexcept;
};

/// All configurations D such that (c, D) is a transition, sorted and
/// deduplicated. Contains c itself when an enabled encounter is an identity.
std::vector<Configuration> successors(const Protocol& p, const Configuration& c);

/// Reachability graph over configurations reachable from I_n, with SCCs.
/// Node 0 is I_n; node indices follow breadth-first discovery order.
namespace detail {

// Growable array of trivially copyable values backed by realloc; large
// buffers grow by remapping instead of copying.
template <typename T>
class PodBuffer {
    static_assert(std::is_trivially_copyable_v<T>);

public:
    std::size_t size() const noexcept { return size_; }
    const T* data() const noexcept { return data_.get(); }
    const T& operator[](std::size_t i) const noexcept { return data_[i]; }

    void append(const T* first, std::size_t count) {
        if (size_ + count > capacity_) grow(size_ + count);
        std::copy_n(first, count, data_.get() + size_);
        size_ += count;
    }

    void shrink_to_fit() {
        if (size_ < capacity_) resize_storage(size_);
    }

private:
    struct Free {
        void operator()(T* p) const noexcept { std::free(p); }
    };

    void grow(std::size_t need) {
        resize_storage(std::max({need, capacity_ + capacity_ / 2, std::size_t{1024}}));
    }

    void resize_storage(std::size_t cap) {
        if (cap == 0) {
            data_.reset();
        } else {
            void* p = std::realloc(data_.get(), cap * sizeof(T));
            if (!p) throw std::bad_alloc();
            data_.release();
            data_.reset(static_cast<T*>(p));
        }
        capacity_ = cap;
    }

    std::unique_ptr<T[], Free> data_;
    std::size_t size_ = 0;
    std::size_t capacity_ = 0;
};

}  // namespace detail

class ReachGraph {
public:
    std::size_t size() const noexcept { return parent_.size(); }
    std::size_t num_states() const noexcept { return num_states_; }
    std::size_t population() const noexcept { return population_; }
    std::size_t root() const noexcept { return 0; }
    std::size_t num_edges() const noexcept { return targets_.size(); }

    std::span<const Count> counts(std::size_t node) const {
        return {blocks_[node / kRowsPerBlock].data() + (node % kRowsPerBlock) * num_states_,
                num_states_};
    }
    Configuration node(std::size_t node) const;
    std::optional<std::size_t> find(const Configuration& c) const;

    std::span<const std::uint32_t> successors(std::size_t node) const {
        return {targets_.data() + offsets_[node], offsets_[node + 1] - offsets_[node]};
    }

    /// BFS parent of a node; the root is its own parent.
    std::size_t parent(std::size_t node) const { return parent_.at(node); }
    /// Configurations along the BFS tree from I_n to node, inclusive.
    std::vector<Configuration> path_to(std::size_t node) const;

    std::size_t scc_of(std::size_t node) const { return scc_.at(node); }
    std::size_t num_sccs() const noexcept { return bottom_.size(); }
    bool is_bottom_scc(std::size_t scc) const { return bottom_.at(scc); }
    bool in_bottom_scc(std::size_t node) const { return bottom_[scc_.at(node)]; }
    std::vector<std::size_t> bottom_sccs() const;

private:
    friend ReachGraph reach(const Protocol&, std::size_t, std::size_t);
    void compute_sccs();

    // Fixed-size blocks so the arena never reallocates.
    static constexpr std::size_t kRowsPerBlock = std::size_t{1} << 16;

    std::size_t num_states_ = 0;
    std::size_t population_ = 0;
    std::vector<std::vector<Count>> blocks_;
    std::vector<std::uint32_t> offsets_{0};
    detail::PodBuffer<std::uint32_t> targets_;
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint32_t> scc_;
    std::vector<bool> bottom_;
};

/// Breadth-first closure of successors from I_n. Throws CapExceeded when more
/// than node_cap configurations are reachable, and std::invalid_argument for
/// n outside [1, 65535].
ReachGraph reach(const Protocol& p, std::size_t n, std::size_t node_cap = kDefaultNodeCap);

/// States appearing in at least one node of the graph.
std::vector<StateId> occurring_states(const ReachGraph& g);

using ConfigPredicate = std::function<bool(std::span<const Count>)>;

/// Membership mask of nodes from which a node satisfying `good` is reachable.
std::vector<bool> can_reach_predicate(const ReachGraph& g, const ConfigPredicate& good);

}  // namespace flockpp
