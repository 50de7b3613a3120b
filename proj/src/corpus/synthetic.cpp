#include "tag/corpus/synthetic.hpp"

#include <array>
#include <cctype>
#include <random>
#include <set>

#include "tag/error.hpp"

namespace tag {

namespace {

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
  bool coin(double p) { return static_cast<double>(rng_() >> 11) * 0x1.0p-53 < p; }
  template <class C>
  const auto& pick(const C& c) {
    return c[index(c.size())];
  }

 private:
  std::mt19937_64 rng_;
};

constexpr std::array<const char*, 11> kStringColumns = {
    "Stadium", "City", "Country", "Team", "Player", "Position",
    "Opponent", "Venue", "Club", "Result", "Date"};
constexpr std::array<const char*, 5> kNumberColumns = {"Capacity", "Year", "Score", "Attendance",
                                                       "Round"};
constexpr std::array<const char*, 12> kSqlLiterals = {
    "London", "Paris",  "Otkrytie Arena", "Red Sox", "Chelsea", "Tokyo",
    "Wembley", "Madrid", "Boston",         "Berlin",  "Lakers",  "Sydney"};
constexpr std::array<const char*, 6> kNumbers = {"10", "25", "50", "100", "1990", "2005"};

struct Agg {
  const char* sql;
  const char* words;
};
constexpr std::array<Agg, 5> kAggs = {{{"MAX", "maximum"},
                                       {"MIN", "minimum"},
                                       {"COUNT", "number of"},
                                       {"SUM", "total"},
                                       {"AVG", "average"}}};

constexpr std::array<const char*, 10> kCities = {"boston", "denver",  "dallas",   "atlanta",
                                                 "seattle", "oakland", "miami",    "phoenix",
                                                 "houston", "detroit"};
constexpr std::array<const char*, 4> kAirlines = {"delta", "united", "american", "continental"};
constexpr std::array<const char*, 4> kTimes = {"800", "1200", "1600", "1800"};

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

// Pronounceable pseudo-words, each used at most once per corpus so that a
// fresh name never reaches the vocabulary threshold.
class FreshNames {
 public:
  FreshNames() {
    const char* reserved[] = {"show", "me", "flights", "from", "to", "leaving", "before",
                              "after", "how", "many", "go", "what", "is", "the", "when",
                              "and", "greater", "than", "less", "of", "number", "total",
                              "average", "maximum", "minimum"};
    for (const char* w : reserved) used_.insert(w);
    for (const char* w : kStringColumns) used_.insert(lower(w));
    for (const char* w : kNumberColumns) used_.insert(lower(w));
    for (const char* w : kCities) used_.insert(w);
    for (const char* w : kAirlines) used_.insert(w);
    for (const char* l : kSqlLiterals) {
      std::string s = lower(l);
      std::size_t start = 0;
      while (start <= s.size()) {
        std::size_t sp = s.find(' ', start);
        if (sp == std::string::npos) sp = s.size();
        used_.insert(s.substr(start, sp - start));
        start = sp + 1;
      }
    }
  }

  std::string word(Draw& d) {
    static constexpr char kOnset[] = "bdfgklmnprstvz";
    static constexpr char kVowel[] = "aeiou";
    static constexpr char kCoda[] = "nrlsk";
    for (;;) {
      std::string w;
      const std::size_t syllables = 2 + d.index(2);
      for (std::size_t i = 0; i < syllables; ++i) {
        w.push_back(kOnset[d.index(sizeof kOnset - 1)]);
        w.push_back(kVowel[d.index(sizeof kVowel - 1)]);
        if (d.coin(0.3)) w.push_back(kCoda[d.index(sizeof kCoda - 1)]);
      }
      if (used_.insert(w).second) return w;
    }
  }

 private:
  std::set<std::string> used_;
};

CorpusRecord make_sql(Draw& d, FreshNames& fresh, double oov_fraction) {
  std::string select_col = d.coin(0.5) ? d.pick(kStringColumns) : d.pick(kNumberColumns);
  std::string code = "SELECT ";
  std::string comment = "what is the ";
  if (d.coin(0.5)) {
    const Agg& a = d.pick(kAggs);
    code += std::string(a.sql) + "(" + select_col + ")";
    comment += std::string(a.words) + " " + lower(select_col);
  } else {
    code += select_col;
    comment += lower(select_col);
  }
  code += " FROM table WHERE ";
  comment += " when ";

  const std::string col1 = d.pick(kStringColumns);
  std::string lit1;
  if (d.coin(oov_fraction)) {
    lit1 = capitalize(fresh.word(d));
    if (d.coin(0.3)) lit1 += " " + capitalize(fresh.word(d));
  } else {
    lit1 = d.pick(kSqlLiterals);
  }
  code += col1 + " = '" + lit1 + "'";
  comment += lower(col1) + " is " + lower(lit1);

  if (d.coin(0.5)) {
    if (d.coin(0.5)) {
      const std::string col = d.pick(kStringColumns);
      const std::string lit = d.pick(kSqlLiterals);
      code += " AND " + col + " = '" + lit + "'";
      comment += " and " + lower(col) + " is " + lower(lit);
    } else {
      const std::string col = d.pick(kNumberColumns);
      const std::string num = d.pick(kNumbers);
      const bool greater = d.coin(0.5);
      code += " AND " + col + (greater ? " > " : " < ") + num;
      comment += " and " + lower(col) + (greater ? " is greater than " : " is less than ") + num;
    }
  }
  comment += " ?";
  return {code, "sql", "", comment};
}

CorpusRecord make_lambda(Draw& d, FreshNames& fresh, double oov_fraction) {
  const std::string from = d.coin(oov_fraction) ? fresh.word(d) : std::string(d.pick(kCities));
  std::string to;
  do {
    to = d.pick(kCities);
  } while (to == from);

  std::string conj = "( flight $0 )";
  std::string airline;
  if (d.coin(0.3)) {
    airline = d.pick(kAirlines);
    conj += " ( airline $0 " + airline + " )";
  }
  conj += " ( from $0 " + from + " ) ( to $0 " + to + " )";
  std::string time_phrase;
  if (d.coin(0.3)) {
    const bool before = d.coin(0.5);
    const std::string t = d.pick(kTimes);
    conj += std::string(" ( ") + (before ? "<" : ">") + " ( departure_time $0 ) " + t + " )";
    time_phrase = std::string(before ? " leaving before " : " leaving after ") + t;
  }

  const std::string flights = airline.empty() ? "flights" : airline + " flights";
  if (d.coin(0.25)) {
    return {"( count $0 ( and " + conj + " ) )", "lambda", "",
            "how many " + flights + " go from " + from + " to " + to + time_phrase};
  }
  return {"( lambda $0 e ( and " + conj + " ) )", "lambda", "",
          "show me " + flights + " from " + from + " to " + to + time_phrase};
}

}  // namespace

std::vector<CorpusRecord> generate_synthetic(std::size_t n, std::uint64_t seed,
                                             const std::string& grammar,
                                             const SyntheticOptions& options) {
  if (grammar != "wikisql" && grammar != "atis") {
    throw ConfigError("synthetic corpora exist for wikisql and atis, not '" + grammar + "'");
  }
  if (n == 0) throw ConfigError("synthetic corpus size must be >= 1");
  if (!(options.oov_fraction >= 0.0 && options.oov_fraction <= 1.0)) {
    throw ConfigError("oov_fraction must lie in [0, 1]");
  }
  Draw d(seed);
  FreshNames fresh;
  std::vector<CorpusRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(grammar == "wikisql" ? make_sql(d, fresh, options.oov_fraction)
                                       : make_lambda(d, fresh, options.oov_fraction));
  }
  return out;
}

}  // namespace tag
