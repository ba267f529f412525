#pragma once

#include <iosfwd>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace aai {

enum class Provenance { SpD, Plausibility, ExternalPf, Sd, Transition, Fused };

std::string_view provenance_name(Provenance p);
Provenance parse_provenance(std::string_view name);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Named per-candidate scores. Candidates are kept in label order. Only SP-d
// tables may hold +infinity (unreachable); NaN is never allowed.
struct ScoreTable {
    Provenance provenance = Provenance::Plausibility;
    std::map<std::string, double> values;
    std::map<std::string, std::string> flags;     // per candidate
    std::map<std::string, std::string> metadata;  // table level: beta, method, direction, notes

    std::size_t size() const { return values.size(); }
    bool empty() const { return values.empty(); }
    double at(const std::string& candidate) const;
    bool has_infinity() const;
    void validate() const;  // throws DomainError
};

// `candidate,score,flags` with a header row; infinity is written as `inf`.
void write_score_csv(std::ostream& out, const ScoreTable& t);
ScoreTable read_score_csv(std::istream& in, Provenance provenance);
void save_score_csv(const std::string& path, const ScoreTable& t);
ScoreTable load_score_csv(const std::string& path, Provenance provenance);

std::string format_double(double v);

// RFC 4180 quoting when the field holds a comma, quote or line break.
std::string csv_field(std::string_view s);
std::vector<std::string> split_csv(const std::string& line);

}  // namespace aai
