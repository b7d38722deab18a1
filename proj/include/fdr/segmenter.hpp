#pragma once

// Format separation: split a Markdown/LaTeX/HTML document into plain-text,
// formula and table segments.
//
// Recognition precedence, highest first. A region claimed by a rule is opaque
// to every later rule, and no match may cross a claimed region.
//   1. fenced code ``` ... ```            -> plain text, shields its interior
//   2. <table ...> ... </table>           -> table (case-insensitive, nesting-aware)
//   3. Markdown pipe tables               -> table (line 2 must be a |---| separator)
//   4. $$..$$, \[..\], \begin{equation|align|align*}..\end{..}  -> formula
//   5. $..$ (single line), \(..\)         -> formula
//   6. everything else                    -> plain text
// Dollar signs and backslash delimiters preceded by an odd number of
// backslashes are escaped. A run of three or more dollars is literal text.
// Unclosed delimiters and whitespace-only formula bodies degrade to plain text.

#include <string>
#include <string_view>
#include <vector>

#include "fdr/doc_model.hpp"

namespace fdr {

// Total over arbitrary byte strings. Segments tile the source exactly.
SegmentedDoc segment(std::string_view doc);

struct TypeProfile {
  bool has_formula = false;
  bool has_table = false;
  // Non-whitespace bytes of formula bodies and table markup over the
  // non-whitespace bytes of every segment body. Delimiters count in neither.
  double formatted_ratio = 0.0;
};

TypeProfile type_profile(std::string_view doc);
TypeProfile type_profile(const SegmentedDoc& doc);

std::vector<const Segment*> segments_of(const SegmentedDoc& doc, SegmentKind kind);

// Contents of every segment of `kind`, in order, joined by `sep`.
std::string join_contents(const SegmentedDoc& doc, SegmentKind kind, std::string_view sep = "\n");

}  // namespace fdr
