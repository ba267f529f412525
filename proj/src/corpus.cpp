#include "aai/corpus.hpp"

#include "aai/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <unordered_set>

namespace aai {

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> string_list(const nlohmann::json& j, const char* field, std::size_t line) {
    if (!j.is_array()) throw ParseError(std::string("field '") + field + "' must be an array", line);
    std::vector<std::string> out;
    out.reserve(j.size());
    for (const auto& item : j) {
        if (!item.is_string())
            throw ParseError(std::string("field '") + field + "' must contain strings", line);
        out.push_back(item.get<std::string>());
    }
    return out;
}

void require_unique(const std::vector<std::string>& values, const char* field, std::size_t line) {
    std::unordered_set<std::string> seen;
    for (const auto& v : values) {
        if (!seen.insert(v).second)
            throw ValidationError("line " + std::to_string(line) + ": duplicate " + field + " '" + v + "'");
    }
}

}  // namespace

KeywordSet::KeywordSet(const std::vector<std::string>& keywords) {
    for (const auto& k : keywords) {
        auto lower = to_lower(trim(k));
        if (lower.empty()) continue;
        if (label_.empty()) label_ = lower;
        words_.insert(std::move(lower));
    }
}

bool KeywordSet::contains(std::string_view token) const {
    return words_.count(to_lower(token)) > 0;
}

std::vector<std::size_t> Corpus::by_year() const {
    std::vector<std::size_t> idx(records.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return records[a].year < records[b].year; });
    return idx;
}

std::pair<int, int> Corpus::year_range() const {
    if (records.empty()) return {0, 0};
    auto [lo, hi] = std::minmax_element(records.begin(), records.end(),
                                        [](const auto& a, const auto& b) { return a.year < b.year; });
    return {lo->year, hi->year};
}

std::vector<std::string> read_keywords(std::istream& in) {
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        auto t = trim(line);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

std::vector<std::string> read_keywords_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open keyword file: " + path);
    auto kw = read_keywords(in);
    if (kw.empty()) throw ValidationError("keyword file is empty: " + path);
    return kw;
}

Corpus parse_corpus(std::istream& in, const std::vector<std::string>& keywords) {
    Corpus corpus;
    corpus.keywords = KeywordSet(keywords);
    if (corpus.keywords.empty()) throw ValidationError("property keyword set must be nonempty");

    std::unordered_set<std::string> ids;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(std::string("invalid JSON: ") + e.what(), lineno);
        }
        if (!j.is_object()) throw ParseError("record must be a JSON object", lineno);
        for (const char* field : {"id", "year", "authors", "entities"}) {
            if (!j.contains(field)) throw ParseError(std::string("missing field '") + field + "'", lineno);
        }
        PaperRecord rec;
        if (!j["id"].is_string()) throw ParseError("field 'id' must be a string", lineno);
        rec.id = j["id"].get<std::string>();
        if (!j["year"].is_number_integer()) throw ParseError("field 'year' must be an integer", lineno);
        rec.year = j["year"].get<int>();
        if (rec.year <= 0) throw ParseError("field 'year' must be positive", lineno);
        rec.authors = string_list(j["authors"], "authors", lineno);
        rec.entities = string_list(j["entities"], "entities", lineno);
        if (j.contains("tokens") && !j["tokens"].is_null()) rec.tokens = string_list(j["tokens"], "tokens", lineno);
        require_unique(rec.authors, "author", lineno);
        require_unique(rec.entities, "entity", lineno);
        if (!ids.insert(rec.id).second)
            throw ValidationError("line " + std::to_string(lineno) + ": duplicate record id '" + rec.id + "'");
        corpus.records.push_back(std::move(rec));
    }
    return corpus;
}

Corpus load_corpus(const std::string& path, const std::vector<std::string>& keywords) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open corpus file: " + path);
    return parse_corpus(in, keywords);
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
    for (const auto& r : corpus.records) {
        nlohmann::json j = {{"id", r.id}, {"year", r.year}, {"authors", r.authors}, {"entities", r.entities}};
        if (!r.tokens.empty()) j["tokens"] = r.tokens;
        out << j.dump() << '\n';
    }
}

bool record_mentions_property(const PaperRecord& rec, const KeywordSet& keywords) {
    auto hit = [&](const std::string& s) { return keywords.contains(s); };
    return std::any_of(rec.entities.begin(), rec.entities.end(), hit) ||
           std::any_of(rec.tokens.begin(), rec.tokens.end(), hit);
}

YearPartition partition_by_year(const Corpus& corpus, int t) {
    YearPartition p;
    p.before.keywords = corpus.keywords;
    p.from.keywords = corpus.keywords;
    for (const auto& r : corpus.records) (r.year < t ? p.before : p.from).records.push_back(r);
    return p;
}

}  // namespace aai
