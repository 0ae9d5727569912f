#include "talagen/tala_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "talagen/error.hpp"

namespace talagen {

using nlohmann::json;

namespace {

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

const json& require(const json& doc, const char* key) {
    auto it = doc.find(key);
    if (it == doc.end()) {
        throw ParseError(key, 0, "missing required field");
    }
    return *it;
}

std::string stroke_name(const json& j, const char* field) {
    if (!j.is_string() || j.get_ref<const std::string&>().empty()) {
        throw ParseError(field, 0, "expected a non-empty stroke name, got " + j.dump());
    }
    return j.get<std::string>();
}

std::vector<StrokeLabel> stroke_list(const json& j, const char* field) {
    if (!j.is_array()) {
        throw ParseError(field, 0, "expected an array of stroke names");
    }
    std::vector<StrokeLabel> out;
    for (const auto& e : j) {
        out.emplace_back(stroke_name(e, field));
    }
    return out;
}

std::vector<int> int_list(const json& j, const char* field) {
    if (!j.is_array()) {
        throw ParseError(field, 0, "expected an array of integers");
    }
    std::vector<int> out;
    for (const auto& e : j) {
        if (!e.is_number_integer()) {
            throw ParseError(field, 0, "expected an integer, got " + e.dump());
        }
        out.push_back(e.get<int>());
    }
    return out;
}

json to_json(const std::vector<StrokeLabel>& strokes) {
    json arr = json::array();
    for (const auto& s : strokes) {
        arr.push_back(s.name);
    }
    return arr;
}

}  // namespace

TalaDefinition load_tala(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError("", line_of_offset(text, e.byte), e.what());
    }
    if (!doc.is_object()) {
        throw ParseError("", 1, "top-level value must be an object");
    }

    const auto& name = require(doc, "name");
    if (!name.is_string()) {
        throw ParseError("name", 0, "expected a string");
    }
    const auto& beats_json = require(doc, "beats");
    if (!beats_json.is_array()) {
        throw ParseError("beats", 0, "expected an array of beats");
    }
    std::vector<Beat> beats;
    for (const auto& b : beats_json) {
        beats.emplace_back(stroke_list(b, "beats"));
    }
    auto vibhags = int_list(require(doc, "vibhags"), "vibhags");
    auto vocabulary = stroke_list(require(doc, "vocabulary"), "vocabulary");
    auto ratio = int_list(require(doc, "ratio"), "ratio");

    std::optional<Beat> filler;
    if (auto it = doc.find("filler"); it != doc.end() && !it->is_null()) {
        filler = Beat(stroke_list(*it, "filler"));
    }
    if (auto it = doc.find("categories"); it != doc.end()) {
        if (!it->is_object()) {
            throw ParseError("categories", 0, "expected an object");
        }
        for (auto& v : vocabulary) {
            auto c = it->find(v.name);
            if (c == it->end()) {
                continue;
            }
            auto parsed = c->is_string() ? parse_stroke_category(c->get<std::string>()) : std::nullopt;
            if (!parsed) {
                throw ParseError("categories", 0, "unknown category " + c->dump() + " for " + v.name);
            }
            v.category = parsed;
        }
    }

    auto tala = make_tala(name.get<std::string>(), std::move(beats), std::move(vibhags), std::move(vocabulary),
                          std::move(ratio), std::move(filler));
    if (auto violations = validate_tala(tala); !violations.empty()) {
        std::string msg = "invalid tala '" + tala.name + "':";
        for (const auto& v : violations) {
            msg += "\n  " + v;
        }
        throw ValidationError(msg);
    }
    return tala;
}

std::string save_tala(const TalaDefinition& tala) {
    json beats = json::array();
    for (const auto& b : tala.theka.beats) {
        beats.push_back(to_json(b.events));
    }
    std::ostringstream out;
    out << "{\n";
    out << "  \"name\": " << json(tala.name).dump() << ",\n";
    out << "  \"beats\": " << beats.dump() << ",\n";
    out << "  \"vibhags\": " << json(tala.theka.vibhags).dump() << ",\n";
    out << "  \"vocabulary\": " << to_json(tala.vocabulary).dump() << ",\n";
    out << "  \"ratio\": " << json(tala.ratio).dump();
    if (tala.filler) {
        out << ",\n  \"filler\": " << to_json(tala.filler->events).dump();
    }
    json categories = json::object();
    for (const auto& v : tala.vocabulary) {
        if (v.category) {
            categories[v.name] = std::string(to_string(*v.category));
        }
    }
    if (!categories.empty()) {
        out << ",\n  \"categories\": " << categories.dump();
    }
    out << "\n}\n";
    return out.str();
}

TalaDefinition load_tala_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open tala definition " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return load_tala(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(e.field(), e.line(), path.string() + ": " + e.detail());
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void save_tala_file(const TalaDefinition& tala, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << save_tala(tala);
    if (!out) {
        throw Error("write failed for " + path.string());
    }
}

std::vector<TalaDefinition> load_tala_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw Error("tala directory not found: " + dir.string());
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<TalaDefinition> out;
    for (const auto& f : files) {
        out.push_back(load_tala_file(f));
    }
    return out;
}

}  // namespace talagen
