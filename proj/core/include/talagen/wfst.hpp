#pragma once

// Weighted finite state transducers over beats. A transition reads an input
// beat (or nothing) and writes an output beat (or nothing) with a probability;
// walking a machine from its initial state emits a beat sequence.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "talagen/rhythm.hpp"

namespace talagen {

using StateId = std::size_t;

struct Transition {
    StateId src = 0;
    std::optional<Beat> input;   // nullopt is epsilon
    std::optional<Beat> output;  // nullopt is epsilon
    double probability = 1.0;
    StateId dst = 0;
};

class Wfst {
public:
    /// Throws StructuralError if a transition references a missing state or
    /// has a probability outside (0, 1].
    Wfst(std::size_t num_states, std::vector<Transition> transitions, StateId initial, std::vector<StateId> finals);

    std::size_t num_states() const noexcept { return outgoing_.size(); }
    const std::vector<Transition>& transitions() const noexcept { return transitions_; }
    StateId initial() const noexcept { return initial_; }
    const std::vector<StateId>& finals() const noexcept { return finals_; }
    bool is_final(StateId q) const;

    /// Indices into transitions() leaving `q`, in insertion order.
    std::span<const std::size_t> outgoing(StateId q) const { return outgoing_.at(q); }

    /// Broken invariants: outgoing probabilities of a state with transitions
    /// must sum to 1 (within 1e-9), a state without transitions must be final,
    /// and a final state must be reachable from the initial one.
    std::vector<std::string> check() const;

private:
    std::vector<Transition> transitions_;
    StateId initial_;
    std::vector<StateId> finals_;
    std::vector<std::vector<std::size_t>> outgoing_;
};

/// Single path q0 -> ... -> qN; transition i has epsilon input, outputs beat i
/// with probability 1. qN is final.
Wfst beat_cycle_fst(const BeatCycle& cycle);

/// One state that is both initial and final; the unit of concat.
Wfst identity_fst();

/// Single path reading the cycle's beats. Transition i writes
/// `replacements[i]` when present and beat i otherwise.
Wfst filler_fst(const BeatCycle& cycle, const std::map<std::size_t, Beat>& replacements);

/// Final states of `a` are merged with the initial state of `b`. Throws if a
/// final state of `a` already has outgoing transitions.
Wfst concat(const Wfst& a, const Wfst& b);
Wfst concat(std::span<const Wfst> parts);

/// Adds an epsilon transition (p = 1) from every final state back to the
/// initial state. Throws if a final state already has outgoing transitions.
Wfst closure(const Wfst& a);

/// Relational composition matching outputs of `a` against inputs of `f`;
/// probabilities multiply and are renormalized per state over the surviving
/// transitions. Epsilon outputs of `a` pass through; `f` must not read
/// epsilon. Throws StructuralError naming the first beat `f` cannot accept
/// when no complete path survives.
Wfst compose(const Wfst& a, const Wfst& f);

/// (T_b)^cycles, closed. With `with_filler` and a tala filler, the last
/// cycle's final beat is replaced by the filler through composition.
Wfst call_cycle_fst(const TalaDefinition& tala, std::size_t cycles, bool with_filler);

struct StrokeEvent {
    std::size_t beat_index = 0;   // beats emitted before this one
    std::size_t stroke_index = 0; // position inside the beat
    std::size_t beat_size = 1;
    StrokeLabel label;
    bool is_sam = false;          // beat_index mod cycle length == 0
};

/// Distinct non-rest strokes written by any transition, sorted by name.
std::vector<StrokeLabel> output_strokes(const Wfst& machine);

/// Walks a machine, sampling among outgoing transitions by probability with a
/// seeded mt19937_64. States with a single transition consume no randomness,
/// so single-path machines emit the same stream for every seed.
class SequenceStream {
public:
    SequenceStream(std::shared_ptr<const Wfst> machine, std::uint64_t seed, std::size_t cycle_beats);

    /// Next emitted beat, or nullptr once a final state without transitions
    /// is reached. The pointer refers into the machine. Throws StructuralError
    /// on a dead-end non-final state or an epsilon-only cycle.
    const Beat* next_beat();

    /// Next stroke, flattening beats. Rests are emitted as Rest events.
    std::optional<StrokeEvent> next_event();

    std::size_t beats_emitted() const noexcept { return beats_; }
    const Wfst& machine() const noexcept { return *machine_; }
    std::size_t cycle_beats() const noexcept { return cycle_beats_; }

private:
    double uniform();

    std::shared_ptr<const Wfst> machine_;
    std::mt19937_64 rng_;
    std::size_t cycle_beats_;
    StateId state_;
    std::size_t beats_ = 0;
    const Beat* pending_ = nullptr;  // beat being flattened by next_event
    std::size_t pending_index_ = 0;
    std::size_t pending_beat_ = 0;
};

}  // namespace talagen
