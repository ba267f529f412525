#include "aai/score_table.hpp"

#include "aai/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace aai {

std::string_view provenance_name(Provenance p) {
    switch (p) {
        case Provenance::SpD: return "sp_d";
        case Provenance::Plausibility: return "plausibility";
        case Provenance::ExternalPf: return "external_pf";
        case Provenance::Sd: return "sd";
        case Provenance::Transition: return "transition";
        case Provenance::Fused: return "fused";
    }
    return "unknown";
}

Provenance parse_provenance(std::string_view name) {
    for (auto p : {Provenance::SpD, Provenance::Plausibility, Provenance::ExternalPf, Provenance::Sd,
                   Provenance::Transition, Provenance::Fused}) {
        if (provenance_name(p) == name) return p;
    }
    throw ParseError("unknown score provenance '" + std::string(name) + "'");
}

double ScoreTable::at(const std::string& candidate) const {
    auto it = values.find(candidate);
    if (it == values.end()) throw LookupError("candidate not in score table: '" + candidate + "'");
    return it->second;
}

bool ScoreTable::has_infinity() const {
    for (const auto& [_, v] : values) {
        if (std::isinf(v)) return true;
    }
    return false;
}

void ScoreTable::validate() const {
    for (const auto& [c, v] : values) {
        if (std::isnan(v)) throw DomainError("score table holds NaN for '" + c + "'");
        if (std::isinf(v) && provenance != Provenance::SpD)
            throw DomainError("infinite score for '" + c + "' in a " + std::string(provenance_name(provenance)) +
                              " table");
    }
}

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    // Shortest representation that reads back to the same double.
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c != '"') {
                field += c;
            } else if (i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else {
                quoted = false;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    out.push_back(std::move(field));
    return out;
}

void write_score_csv(std::ostream& out, const ScoreTable& t) {
    out << "candidate,score,flags\n";
    for (const auto& [c, v] : t.values) {
        auto f = t.flags.find(c);
        out << csv_field(c) << ',' << format_double(v) << ',' << csv_field(f == t.flags.end() ? "" : f->second) << '\n';
    }
}

ScoreTable read_score_csv(std::istream& in, Provenance provenance) {
    ScoreTable t;
    t.provenance = provenance;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_csv(line);
        if (!header) {
            if (fields.size() < 2 || fields[0] != "candidate") throw ParseError("expected 'candidate,score' header", lineno);
            header = true;
            continue;
        }
        if (fields.size() < 2) throw ParseError("expected candidate,score", lineno);
        double v = 0.0;
        if (fields[1] == "inf") {
            v = kInfinity;
        } else {
            char* end = nullptr;
            v = std::strtod(fields[1].c_str(), &end);
            if (end == fields[1].c_str() || *end != '\0') throw ParseError("bad score '" + fields[1] + "'", lineno);
        }
        if (!t.values.emplace(fields[0], v).second) throw ValidationError("duplicate candidate '" + fields[0] + "'");
        if (fields.size() > 2 && !fields[2].empty()) t.flags[fields[0]] = fields[2];
    }
    if (!header) throw ParseError("empty score file");
    t.validate();
    return t;
}

void save_score_csv(const std::string& path, const ScoreTable& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    write_score_csv(out, t);
}

ScoreTable load_score_csv(const std::string& path, Provenance provenance) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    return read_score_csv(in, provenance);
}

}  // namespace aai
