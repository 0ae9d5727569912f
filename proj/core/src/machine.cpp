#include "talagen/machine.hpp"

#include "json.hpp"

#include "talagen/error.hpp"

namespace talagen {

using nlohmann::json;

MachineLayout parse_machine_layout(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError("", 0, e.what());
    }
    if (!doc.is_object()) {
        throw ParseError("", 1, "top-level value must be an object");
    }
    auto it = doc.find("cycles");
    if (it == doc.end()) {
        throw ParseError("cycles", 0, "missing required field");
    }
    if (!it->is_array() || it->empty()) {
        throw ParseError("cycles", 0, "expected a non-empty array");
    }
    MachineLayout layout;
    for (const auto& entry : *it) {
        CycleRef ref;
        if (entry.is_string()) {
            ref.tala = entry.get<std::string>();
        } else if (entry.is_object() && entry.contains("tala") && entry["tala"].is_string()) {
            ref.tala = entry["tala"].get<std::string>();
            if (auto f = entry.find("fillers"); f != entry.end()) {
                if (!f->is_array()) {
                    throw ParseError("fillers", 0, "expected an array");
                }
                for (const auto& filler : *f) {
                    if (!filler.is_object() || !filler.contains("beat_index") ||
                        !filler["beat_index"].is_number_unsigned() || !filler.contains("strokes") ||
                        !filler["strokes"].is_array() || filler["strokes"].empty()) {
                        throw ParseError("fillers", 0, "expected {\"beat_index\": n, \"strokes\": [...]}");
                    }
                    Beat beat;
                    for (const auto& s : filler["strokes"]) {
                        if (!s.is_string() || s.get_ref<const std::string&>().empty()) {
                            throw ParseError("strokes", 0, "expected stroke names");
                        }
                        beat.events.emplace_back(s.get<std::string>());
                    }
                    ref.fillers[filler["beat_index"].get<std::size_t>()] = std::move(beat);
                }
            }
        } else {
            throw ParseError("cycles", 0, "entries must be tala names or {\"tala\": ...} objects");
        }
        layout.cycles.push_back(std::move(ref));
    }
    if (auto r = doc.find("repeat"); r != doc.end()) {
        if (!r->is_boolean()) {
            throw ParseError("repeat", 0, "expected a boolean");
        }
        layout.repeat = r->get<bool>();
    }
    return layout;
}

MachineLayout default_layout(const TalaDefinition& tala, std::size_t cycles, bool with_filler) {
    MachineLayout layout;
    layout.cycles.assign(cycles, CycleRef{tala.name, {}});
    if (with_filler && tala.filler && cycles > 0 && !tala.theka.beats.empty()) {
        layout.cycles.back().fillers[tala.theka.beats.size() - 1] = *tala.filler;
    }
    return layout;
}

BuiltMachine build_machine(const MachineLayout& layout, const std::vector<TalaDefinition>& talas) {
    if (layout.cycles.empty()) {
        throw StructuralError("machine layout has no cycles");
    }
    std::vector<Wfst> parts;
    std::size_t cycle_beats = 0;
    for (const auto& ref : layout.cycles) {
        const auto* tala = find_tala(talas, ref.tala);
        if (tala == nullptr) {
            throw Error("unknown tala '" + ref.tala + "'");
        }
        if (cycle_beats == 0) {
            cycle_beats = tala->beats();
        }
        Wfst cycle = beat_cycle_fst(tala->theka);
        if (!ref.fillers.empty()) {
            cycle = compose(cycle, filler_fst(tala->theka, ref.fillers));
        }
        parts.push_back(std::move(cycle));
    }
    Wfst machine = concat(std::span<const Wfst>(parts));
    if (layout.repeat) {
        machine = closure(machine);
    }
    return {std::move(machine), cycle_beats};
}

}  // namespace talagen
