#pragma once

#include <istream>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace aai {

struct PaperRecord {
    std::string id;
    int year = 0;
    std::vector<std::string> authors;
    std::vector<std::string> entities;
    std::vector<std::string> tokens;  // optional abstract tokens
};

// Property keywords are stored lower-cased. The first keyword of the input
// list names the property node and the canonical property token.
class KeywordSet {
public:
    KeywordSet() = default;
    explicit KeywordSet(const std::vector<std::string>& keywords);

    bool contains(std::string_view token) const;  // case-insensitive
    const std::string& label() const { return label_; }
    const std::set<std::string>& words() const { return words_; }
    bool empty() const { return words_.empty(); }

private:
    std::set<std::string> words_;
    std::string label_;
};

struct Corpus {
    std::vector<PaperRecord> records;
    KeywordSet keywords;

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }

    // Record indices ordered by year, input order within a year.
    std::vector<std::size_t> by_year() const;
    std::pair<int, int> year_range() const;  // {0, 0} when empty
};

std::string to_lower(std::string_view s);

// One keyword per line; blank lines and surrounding whitespace ignored.
std::vector<std::string> read_keywords(std::istream& in);
std::vector<std::string> read_keywords_file(const std::string& path);

// JSON Lines, one record per line. Throws ParseError (with line number) for
// malformed lines and ValidationError for duplicate ids or duplicate
// authors/entities inside a record.
Corpus parse_corpus(std::istream& in, const std::vector<std::string>& keywords);
Corpus load_corpus(const std::string& path, const std::vector<std::string>& keywords);
void write_corpus(std::ostream& out, const Corpus& corpus);

// True iff a keyword equals (case-insensitively, whole token) one of the
// record's entities or tokens.
bool record_mentions_property(const PaperRecord& rec, const KeywordSet& keywords);

struct YearPartition {
    Corpus before;  // year < t
    Corpus from;    // year >= t
};

YearPartition partition_by_year(const Corpus& corpus, int t);

}  // namespace aai
