#pragma once

// Call-cycle layouts read from JSON:
//
//   {
//     "cycles": [
//       "tintal", "tintal", "tintal",
//       {"tala": "tintal", "fillers": [{"beat_index": 15, "strokes": ["Ti", "Ra", "Ki", "Ta"]}]}
//     ],
//     "repeat": true
//   }
//
// A string entry is one plain beat cycle; an object may replace beats
// through filler composition. "repeat" (default true) closes the machine.

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "talagen/rhythm.hpp"
#include "talagen/wfst.hpp"

namespace talagen {

struct CycleRef {
    std::string tala;
    std::map<std::size_t, Beat> fillers;  // beat index -> replacement
};

struct MachineLayout {
    std::vector<CycleRef> cycles;
    bool repeat = true;
};

/// Throws ParseError.
MachineLayout parse_machine_layout(std::string_view text);

/// The layout every CLI default uses: `cycles` repetitions of `tala`, with
/// its filler on the last beat of the last cycle when requested.
MachineLayout default_layout(const TalaDefinition& tala, std::size_t cycles, bool with_filler);

struct BuiltMachine {
    Wfst machine;
    std::size_t cycle_beats = 1;  // beats of the first cycle's tala, for sam marking
};

/// Throws Error for unknown talas and StructuralError for fillers that do not fit.
BuiltMachine build_machine(const MachineLayout& layout, const std::vector<TalaDefinition>& talas);

}  // namespace talagen
