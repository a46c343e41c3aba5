#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "alice/graph.hpp"

namespace alice {

/// How a query's attribute set was produced.
///   EmA: empty attribute set.
///   AFC: one attribute from the community's most frequent attributes.
///   AFN: attributes taken from the query nodes themselves.
enum class QueryMode { EmA, AFC, AFN };

std::string_view to_string(QueryMode mode);
std::optional<QueryMode> parse_query_mode(std::string_view text);

struct Query {
  std::vector<NodeId> nodes;
  std::vector<AttrId> attributes;
  QueryMode mode = QueryMode::EmA;
};

}  // namespace alice
