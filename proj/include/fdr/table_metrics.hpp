#pragma once

// Tables as ordered labeled trees, tree edit distance and TEDS.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "fdr/doc_model.hpp"

namespace fdr {

enum class TableTag { Table, Thead, Tbody, Tr, Td };

std::string_view to_string(TableTag tag) noexcept;

struct TableNode {
  TableTag tag = TableTag::Td;
  int rowspan = 1;
  int colspan = 1;
  bool header = false;  // a <th> folded into td
  std::string text;     // td only, whitespace-collapsed
  std::vector<std::size_t> children;

  bool operator==(const TableNode&) const = default;
};

// nodes[0] is the root <table>; node indices follow preorder.
struct TableTree {
  std::vector<TableNode> nodes;

  std::size_t size() const noexcept { return nodes.size(); }
  const TableNode& root() const { return nodes.front(); }
  bool operator==(const TableTree&) const = default;
};

struct TableParseOptions {
  // Keep <thead>/<tbody> wrappers as tree nodes.
  bool keep_wrappers = true;
};

// Lenient parser for an HTML <table> fragment or a Markdown pipe table.
// Throws Error{MalformedTable} only when no row can be recovered.
TableTree parse_table(std::string_view markup, const TableParseOptions& opts = {});

// Compact s-expression, e.g. table(tr(td"a",td"b")). Used in tests and logs.
std::string describe(const TableTree& t);

enum class TedMode { Content, StructureOnly };

// Rename cost between two nodes. Insert and delete both cost 1.
double rename_cost(const TableNode& a, const TableNode& b, TedMode mode);

// Zhang-Shasha ordered tree edit distance.
double ted(const TableTree& a, const TableTree& b, TedMode mode);

// 1 - ted / max(|pred|, |gt|). Pairs where either tree exceeds node_cap are
// scored in structure-only mode.
double teds(const TableTree& pred, const TableTree& gt, bool structure_only, std::size_t node_cap = 5000);

struct TableConfig {
  std::size_t node_cap = 5000;
  bool keep_wrappers = true;

  bool operator==(const TableConfig&) const = default;
};

// Positional alignment of the i-th predicted table with the i-th ground-truth
// table, mean TEDS over max(#pred, #gt). Unmatched or unparseable predicted
// tables score 0 for their slot.
double table_reward(const std::vector<std::string>& pred_tables, const std::vector<std::string>& gt_tables,
                    const TableConfig& cfg = {}, bool structure_only = false);

double table_reward(const std::vector<const Segment*>& pred_tables, const std::vector<const Segment*>& gt_tables,
                    const TableConfig& cfg = {}, bool structure_only = false);

}  // namespace fdr
