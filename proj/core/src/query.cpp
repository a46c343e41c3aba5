#include "alice/query.hpp"

namespace alice {

std::string_view to_string(QueryMode mode) {
  switch (mode) {
    case QueryMode::EmA: return "EmA";
    case QueryMode::AFC: return "AFC";
    case QueryMode::AFN: return "AFN";
  }
  return "EmA";
}

std::optional<QueryMode> parse_query_mode(std::string_view text) {
  if (text == "EmA" || text == "ema") return QueryMode::EmA;
  if (text == "AFC" || text == "afc") return QueryMode::AFC;
  if (text == "AFN" || text == "afn") return QueryMode::AFN;
  return std::nullopt;
}

}  // namespace alice
