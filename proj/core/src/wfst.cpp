#include "talagen/wfst.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <utility>

#include "talagen/error.hpp"

namespace talagen {

namespace {

constexpr double kProbabilityTolerance = 1e-9;

}  // namespace

Wfst::Wfst(std::size_t num_states, std::vector<Transition> transitions, StateId initial, std::vector<StateId> finals)
    : transitions_(std::move(transitions)), initial_(initial), finals_(std::move(finals)), outgoing_(num_states) {
    if (num_states == 0 || initial >= num_states) {
        throw StructuralError("initial state " + std::to_string(initial) + " does not exist");
    }
    for (StateId f : finals_) {
        if (f >= num_states) {
            throw StructuralError("final state " + std::to_string(f) + " does not exist");
        }
    }
    std::sort(finals_.begin(), finals_.end());
    finals_.erase(std::unique(finals_.begin(), finals_.end()), finals_.end());
    for (std::size_t k = 0; k < transitions_.size(); ++k) {
        const auto& t = transitions_[k];
        if (t.src >= num_states || t.dst >= num_states) {
            throw StructuralError("transition " + std::to_string(k) + " references a missing state");
        }
        if (!(t.probability > 0.0) || t.probability > 1.0 + kProbabilityTolerance) {
            throw StructuralError("transition " + std::to_string(k) + " has probability outside (0, 1]");
        }
        outgoing_[t.src].push_back(k);
    }
}

bool Wfst::is_final(StateId q) const {
    return std::binary_search(finals_.begin(), finals_.end(), q);
}

std::vector<std::string> Wfst::check() const {
    std::vector<std::string> v;
    for (StateId q = 0; q < num_states(); ++q) {
        const auto& out = outgoing_[q];
        if (out.empty()) {
            if (!is_final(q)) {
                v.push_back("state " + std::to_string(q) + " is a dead end");
            }
            continue;
        }
        double sum = 0.0;
        for (auto k : out) {
            sum += transitions_[k].probability;
        }
        if (std::abs(sum - 1.0) > kProbabilityTolerance) {
            v.push_back("outgoing probabilities of state " + std::to_string(q) + " sum to " + std::to_string(sum));
        }
    }
    std::vector<bool> reached(num_states(), false);
    std::deque<StateId> queue{initial_};
    reached[initial_] = true;
    bool final_reached = false;
    while (!queue.empty()) {
        const StateId q = queue.front();
        queue.pop_front();
        final_reached = final_reached || is_final(q);
        for (auto k : outgoing_[q]) {
            const StateId d = transitions_[k].dst;
            if (!reached[d]) {
                reached[d] = true;
                queue.push_back(d);
            }
        }
    }
    if (!final_reached) {
        v.emplace_back("no final state is reachable from the initial state");
    }
    return v;
}

Wfst beat_cycle_fst(const BeatCycle& cycle) {
    std::vector<Transition> ts;
    ts.reserve(cycle.beats.size());
    for (std::size_t i = 0; i < cycle.beats.size(); ++i) {
        ts.push_back({i, std::nullopt, cycle.beats[i], 1.0, i + 1});
    }
    return Wfst(cycle.beats.size() + 1, std::move(ts), 0, {cycle.beats.size()});
}

Wfst identity_fst() { return Wfst(1, {}, 0, {0}); }

Wfst filler_fst(const BeatCycle& cycle, const std::map<std::size_t, Beat>& replacements) {
    std::vector<Transition> ts;
    for (std::size_t i = 0; i < cycle.beats.size(); ++i) {
        auto r = replacements.find(i);
        ts.push_back({i, cycle.beats[i], r != replacements.end() ? r->second : cycle.beats[i], 1.0, i + 1});
    }
    for (const auto& [i, beat] : replacements) {
        if (i >= cycle.beats.size()) {
            throw StructuralError("filler position " + std::to_string(i) + " is outside a " +
                                  std::to_string(cycle.beats.size()) + "-beat cycle");
        }
    }
    return Wfst(cycle.beats.size() + 1, std::move(ts), 0, {cycle.beats.size()});
}

Wfst concat(const Wfst& a, const Wfst& b) {
    for (StateId f : a.finals()) {
        if (!a.outgoing(f).empty()) {
            throw StructuralError("concat: final state " + std::to_string(f) + " already has outgoing transitions");
        }
    }
    // a's finals collapse onto one state that doubles as b's initial.
    std::vector<StateId> map_a(a.num_states());
    std::vector<StateId> map_b(b.num_states());
    StateId next = 0;
    StateId merged = 0;
    bool merged_assigned = false;
    for (StateId q = 0; q < a.num_states(); ++q) {
        if (a.is_final(q)) {
            if (!merged_assigned) {
                merged = next++;
                merged_assigned = true;
            }
            map_a[q] = merged;
        } else {
            map_a[q] = next++;
        }
    }
    if (!merged_assigned) {
        throw StructuralError("concat: left operand has no final state");
    }
    for (StateId q = 0; q < b.num_states(); ++q) {
        map_b[q] = q == b.initial() ? merged : next++;
    }

    std::vector<Transition> ts;
    ts.reserve(a.transitions().size() + b.transitions().size());
    for (auto t : a.transitions()) {
        t.src = map_a[t.src];
        t.dst = map_a[t.dst];
        ts.push_back(std::move(t));
    }
    for (auto t : b.transitions()) {
        t.src = map_b[t.src];
        t.dst = map_b[t.dst];
        ts.push_back(std::move(t));
    }
    std::vector<StateId> finals;
    for (StateId f : b.finals()) {
        finals.push_back(map_b[f]);
    }
    return Wfst(next, std::move(ts), map_a[a.initial()], std::move(finals));
}

Wfst concat(std::span<const Wfst> parts) {
    Wfst out = identity_fst();
    for (const auto& p : parts) {
        out = concat(out, p);
    }
    return out;
}

Wfst closure(const Wfst& a) {
    std::vector<Transition> ts = a.transitions();
    for (StateId f : a.finals()) {
        if (!a.outgoing(f).empty()) {
            throw StructuralError("closure: final state " + std::to_string(f) + " already has outgoing transitions");
        }
        ts.push_back({f, std::nullopt, std::nullopt, 1.0, a.initial()});
    }
    return Wfst(a.num_states(), std::move(ts), a.initial(), a.finals());
}

Wfst compose(const Wfst& a, const Wfst& f) {
    for (const auto& t : f.transitions()) {
        if (!t.input) {
            throw StructuralError("compose: epsilon input on the right operand is not supported");
        }
    }

    std::map<std::pair<StateId, StateId>, StateId> ids;
    std::vector<std::pair<StateId, StateId>> pairs;
    auto id_of = [&](StateId qa, StateId qf) {
        auto [it, inserted] = ids.try_emplace({qa, qf}, pairs.size());
        if (inserted) {
            pairs.emplace_back(qa, qf);
        }
        return it->second;
    };

    std::vector<Transition> ts;
    std::optional<std::string> first_unmatched;
    id_of(a.initial(), f.initial());
    for (std::size_t head = 0; head < pairs.size(); ++head) {
        const auto [qa, qf] = pairs[head];
        for (auto ka : a.outgoing(qa)) {
            const auto& ta = a.transitions()[ka];
            if (!ta.output) {
                ts.push_back({head, ta.input, std::nullopt, ta.probability, id_of(ta.dst, qf)});
                continue;
            }
            bool matched = false;
            for (auto kf : f.outgoing(qf)) {
                const auto& tf = f.transitions()[kf];
                if (*tf.input == *ta.output) {
                    ts.push_back({head, ta.input, tf.output, ta.probability * tf.probability, id_of(ta.dst, tf.dst)});
                    matched = true;
                }
            }
            if (!matched && !first_unmatched) {
                first_unmatched = "beat '" + to_string(*ta.output) + "' (left state " + std::to_string(qa) +
                                  ", filler state " + std::to_string(qf) + ")";
            }
        }
    }

    // Keep only states from which a final pair is reachable.
    const std::size_t n = pairs.size();
    std::vector<std::vector<std::size_t>> incoming(n);
    for (std::size_t k = 0; k < ts.size(); ++k) {
        incoming[ts[k].dst].push_back(k);
    }
    std::vector<bool> live(n, false);
    std::deque<StateId> queue;
    for (StateId q = 0; q < n; ++q) {
        if (a.is_final(pairs[q].first) && f.is_final(pairs[q].second)) {
            live[q] = true;
            queue.push_back(q);
        }
    }
    while (!queue.empty()) {
        const StateId q = queue.front();
        queue.pop_front();
        for (auto k : incoming[q]) {
            if (!live[ts[k].src]) {
                live[ts[k].src] = true;
                queue.push_back(ts[k].src);
            }
        }
    }
    if (!live[0]) {
        throw StructuralError("composition is empty: no filler transition accepts " +
                              first_unmatched.value_or(std::string("any path to a final state")));
    }

    std::vector<StateId> remap(n, 0);
    StateId next = 0;
    for (StateId q = 0; q < n; ++q) {
        if (live[q]) {
            remap[q] = next++;
        }
    }
    std::vector<Transition> kept;
    std::vector<double> mass(next, 0.0);
    for (auto& t : ts) {
        if (live[t.src] && live[t.dst]) {
            t.src = remap[t.src];
            t.dst = remap[t.dst];
            mass[t.src] += t.probability;
            kept.push_back(std::move(t));
        }
    }
    for (auto& t : kept) {
        t.probability /= mass[t.src];
    }
    std::vector<StateId> finals;
    for (StateId q = 0; q < n; ++q) {
        if (live[q] && a.is_final(pairs[q].first) && f.is_final(pairs[q].second)) {
            finals.push_back(remap[q]);
        }
    }
    return Wfst(next, std::move(kept), 0, std::move(finals));
}

std::vector<StrokeLabel> output_strokes(const Wfst& machine) {
    std::set<std::string> names;
    for (const auto& t : machine.transitions()) {
        if (t.output) {
            for (const auto& s : t.output->events) {
                if (!s.is_rest()) {
                    names.insert(s.name);
                }
            }
        }
    }
    return {names.begin(), names.end()};
}

Wfst call_cycle_fst(const TalaDefinition& tala, std::size_t cycles, bool with_filler) {
    if (cycles == 0) {
        throw StructuralError("a call cycle needs at least one beat cycle");
    }
    const Wfst cycle = beat_cycle_fst(tala.theka);
    std::vector<Wfst> parts(cycles, cycle);
    if (with_filler && tala.filler && !tala.theka.beats.empty()) {
        parts.back() = compose(cycle, filler_fst(tala.theka, {{tala.theka.beats.size() - 1, *tala.filler}}));
    }
    return closure(concat(std::span<const Wfst>(parts)));
}

SequenceStream::SequenceStream(std::shared_ptr<const Wfst> machine, std::uint64_t seed, std::size_t cycle_beats)
    : machine_(std::move(machine)), rng_(seed), cycle_beats_(std::max<std::size_t>(1, cycle_beats)),
      state_(machine_->initial()) {}

double SequenceStream::uniform() {
    // 53 random bits; the mt19937_64 sequence is fixed by the standard.
    return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

const Beat* SequenceStream::next_beat() {
    std::size_t silent_steps = 0;
    while (true) {
        const auto out = machine_->outgoing(state_);
        if (out.empty()) {
            if (machine_->is_final(state_)) {
                return nullptr;
            }
            throw StructuralError("dead end at non-final state " + std::to_string(state_));
        }
        std::size_t pick = out.front();
        if (out.size() > 1) {
            const double u = uniform();
            double cumulative = 0.0;
            pick = out.back();
            for (auto k : out) {
                cumulative += machine_->transitions()[k].probability;
                if (u < cumulative) {
                    pick = k;
                    break;
                }
            }
        }
        const auto& t = machine_->transitions()[pick];
        state_ = t.dst;
        if (t.output) {
            ++beats_;
            return &*t.output;
        }
        if (++silent_steps > machine_->num_states()) {
            throw StructuralError("epsilon cycle without output");
        }
    }
}

std::optional<StrokeEvent> SequenceStream::next_event() {
    while (pending_ == nullptr || pending_index_ >= pending_->events.size()) {
        pending_beat_ = beats_;
        pending_ = next_beat();
        pending_index_ = 0;
        if (pending_ == nullptr) {
            return std::nullopt;
        }
    }
    StrokeEvent e;
    e.beat_index = pending_beat_;
    e.stroke_index = pending_index_;
    e.beat_size = pending_->events.size();
    e.label = pending_->events[pending_index_];
    e.is_sam = pending_beat_ % cycle_beats_ == 0;
    ++pending_index_;
    return e;
}

}  // namespace talagen
