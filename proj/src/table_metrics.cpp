#include "fdr/table_metrics.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>

#include "fdr/text_metrics.hpp"
#include "fdr/utf8.hpp"

namespace fdr {

namespace {

std::string collapse_ws(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending = false;
  for (char c : s) {
    if (utf8::is_ascii_space(c)) {
      pending = !out.empty();
      continue;
    }
    if (pending) out.push_back(' ');
    pending = false;
    out.push_back(c);
  }
  return out;
}

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool contains_ci(std::string_view hay, std::string_view needle) {
  return lower_ascii(hay).find(needle) != std::string::npos;
}

void decode_entities(std::string_view s, std::string& out) {
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      out.push_back(s[i++]);
      continue;
    }
    std::size_t semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 10) {
      out.push_back(s[i++]);
      continue;
    }
    std::string_view name = s.substr(i + 1, semi - i - 1);
    if (name == "amp") out.push_back('&');
    else if (name == "lt") out.push_back('<');
    else if (name == "gt") out.push_back('>');
    else if (name == "quot") out.push_back('"');
    else if (name == "apos" || name == "#39") out.push_back('\'');
    else if (name == "nbsp") out.push_back(' ');
    else if (name.size() > 1 && name[0] == '#') {
      unsigned long cp = 0;
      bool hex = name[1] == 'x' || name[1] == 'X';
      std::string_view digits = name.substr(hex ? 2 : 1);
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), cp, hex ? 16 : 10);
      if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty() || cp == 0 ||
          cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        out.append(s.substr(i, semi - i + 1));
      } else {
        utf8::append(out, static_cast<char32_t>(cp));
      }
    } else {
      out.append(s.substr(i, semi - i + 1));
    }
    i = semi + 1;
  }
}

int parse_span_attr(std::string_view attrs_lower, std::string_view name) {
  std::size_t pos = 0;
  while ((pos = attrs_lower.find(name, pos)) != std::string_view::npos) {
    bool word_start = pos == 0 || !std::isalnum(static_cast<unsigned char>(attrs_lower[pos - 1]));
    std::size_t i = pos + name.size();
    pos = i;
    if (!word_start) continue;
    while (i < attrs_lower.size() && utf8::is_ascii_space(attrs_lower[i])) ++i;
    if (i >= attrs_lower.size() || attrs_lower[i] != '=') continue;
    ++i;
    while (i < attrs_lower.size() && (utf8::is_ascii_space(attrs_lower[i]) || attrs_lower[i] == '"' ||
                                      attrs_lower[i] == '\''))
      ++i;
    int value = 0;
    auto [ptr, ec] = std::from_chars(attrs_lower.data() + i, attrs_lower.data() + attrs_lower.size(), value);
    if (ec != std::errc() || value < 1) return 1;
    return std::min(value, 10000);
  }
  return 1;
}

class HtmlTableBuilder {
 public:
  explicit HtmlTableBuilder(const TableParseOptions& opts) : opts_(opts) {
    tree_.nodes.push_back(TableNode{TableTag::Table, 1, 1, false, {}, {}});
  }

  TableTree build(std::string_view markup) {
    std::size_t i = 0;
    // Content before the outermost <table> is ignored.
    std::string lower = lower_ascii(markup);
    if (std::size_t t = lower.find("<table"); t != std::string::npos) {
      std::size_t gt = markup.find('>', t);
      i = gt == std::string_view::npos ? markup.size() : gt + 1;
    }
    while (i < markup.size() && !done_) {
      if (markup[i] == '<') {
        if (markup.compare(i, 4, "<!--") == 0) {
          std::size_t end = markup.find("-->", i + 4);
          i = end == std::string_view::npos ? markup.size() : end + 3;
          continue;
        }
        std::size_t gt = markup.find('>', i + 1);
        if (gt == std::string_view::npos) {
          text(markup.substr(i));
          break;
        }
        tag(markup.substr(i + 1, gt - i - 1));
        i = gt + 1;
        continue;
      }
      std::size_t lt = markup.find('<', i);
      std::size_t end = lt == std::string_view::npos ? markup.size() : lt;
      text(markup.substr(i, end - i));
      i = end;
    }
    close_cell();
    for (auto& n : tree_.nodes) {
      if (n.tag == TableTag::Td) n.text = collapse_ws(n.text);
    }
    return std::move(tree_);
  }

  bool has_rows() const { return rows_ > 0; }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  const TableParseOptions& opts_;
  TableTree tree_;
  std::size_t section_ = kNone;
  std::size_t row_ = kNone;
  std::size_t cell_ = kNone;
  int nested_ = 0;
  bool done_ = false;
  std::size_t rows_ = 0;

  std::size_t add_child(std::size_t parent, TableNode node) {
    std::size_t idx = tree_.nodes.size();
    tree_.nodes.push_back(std::move(node));
    tree_.nodes[parent].children.push_back(idx);
    return idx;
  }

  void close_cell() { cell_ = kNone; }
  void close_row() {
    close_cell();
    row_ = kNone;
  }
  void close_section() {
    close_row();
    section_ = kNone;
  }

  std::size_t row_parent() const { return section_ == kNone ? 0 : section_; }

  void open_row() {
    close_row();
    row_ = add_child(row_parent(), TableNode{TableTag::Tr, 1, 1, false, {}, {}});
    ++rows_;
  }

  void text(std::string_view raw) {
    if (cell_ == kNone) return;
    decode_entities(raw, tree_.nodes[cell_].text);
  }

  void tag(std::string_view body) {
    bool closing = !body.empty() && body.front() == '/';
    if (closing) body.remove_prefix(1);
    std::size_t name_end = 0;
    while (name_end < body.size() && std::isalnum(static_cast<unsigned char>(body[name_end]))) ++name_end;
    std::string name = lower_ascii(body.substr(0, name_end));
    std::string attrs = lower_ascii(body.substr(name_end));

    if (nested_ > 0) {
      if (name == "table") nested_ += closing ? -1 : 1;
      else if (cell_ != kNone && (name == "td" || name == "th" || name == "br")) text(" ");
      return;
    }
    if (name == "table") {
      if (closing) {
        done_ = true;
      } else if (cell_ != kNone) {
        ++nested_;
      }
      return;
    }
    if (name == "thead" || name == "tbody" || name == "tfoot") {
      close_section();
      if (!closing && opts_.keep_wrappers) {
        TableTag t = name == "thead" ? TableTag::Thead : TableTag::Tbody;
        section_ = add_child(0, TableNode{t, 1, 1, false, {}, {}});
      }
      return;
    }
    if (name == "tr") {
      if (closing) close_row();
      else open_row();
      return;
    }
    if (name == "td" || name == "th") {
      close_cell();
      if (closing) return;
      if (row_ == kNone) open_row();
      TableNode cell{TableTag::Td, parse_span_attr(attrs, "rowspan"), parse_span_attr(attrs, "colspan"),
                     name == "th", {}, {}};
      cell_ = add_child(row_, std::move(cell));
      return;
    }
    if (name == "br" && cell_ != kNone) text(" ");
    // Any other tag contributes nothing but its text.
  }
};

bool is_md_separator(std::string_view line) {
  bool dash = false;
  for (char c : line) {
    if (c == '-') dash = true;
    else if (c != ':' && c != '|' && c != ' ' && c != '\t') return false;
  }
  return dash;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && utf8::is_ascii_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && utf8::is_ascii_space(s.back())) s.remove_suffix(1);
  return s;
}

TableTree parse_markdown(std::string_view markup) {
  TableTree tree;
  tree.nodes.push_back(TableNode{TableTag::Table, 1, 1, false, {}, {}});
  std::size_t pipe_line = 0;
  std::size_t pos = 0;
  while (pos <= markup.size()) {
    std::size_t nl = markup.find('\n', pos);
    std::string_view line =
        trim(markup.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    pos = nl == std::string_view::npos ? markup.size() + 1 : nl + 1;
    if (line.empty() || line.front() != '|') continue;
    ++pipe_line;
    if (pipe_line == 2 && is_md_separator(line)) continue;

    line.remove_prefix(1);
    if (!line.empty() && line.back() == '|' && !(line.size() >= 2 && line[line.size() - 2] == '\\'))
      line.remove_suffix(1);

    std::size_t tr = tree.nodes.size();
    tree.nodes.push_back(TableNode{TableTag::Tr, 1, 1, false, {}, {}});
    tree.nodes[0].children.push_back(tr);
    std::string cell;
    auto flush = [&] {
      std::size_t td = tree.nodes.size();
      tree.nodes.push_back(TableNode{TableTag::Td, 1, 1, false, collapse_ws(cell), {}});
      tree.nodes[tr].children.push_back(td);
      cell.clear();
    };
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '\\' && i + 1 < line.size() && line[i + 1] == '|') {
        cell.push_back('|');
        ++i;
      } else if (line[i] == '|') {
        flush();
      } else {
        cell.push_back(line[i]);
      }
    }
    flush();
  }
  return tree;
}

// Postorder view of a tree, 1-based as in the Zhang-Shasha formulation.
struct Postorder {
  std::vector<std::size_t> node;  // postorder index -> node id
  std::vector<std::size_t> lld;   // leftmost leaf descendant, postorder index
  std::vector<std::size_t> keyroots;

  explicit Postorder(const TableTree& t) {
    const std::size_t n = t.size();
    node.assign(n + 1, 0);
    lld.assign(n + 1, 0);
    std::vector<std::size_t> post_of(n, 0);
    std::vector<std::pair<std::size_t, std::size_t>> stack;  // (node, next child)
    std::size_t k = 0;
    if (n > 0) stack.emplace_back(0, 0);
    while (!stack.empty()) {
      auto& [id, next] = stack.back();
      const auto& kids = t.nodes[id].children;
      if (next < kids.size()) {
        std::size_t child = kids[next++];
        stack.emplace_back(child, 0);
        continue;
      }
      ++k;
      node[k] = id;
      post_of[id] = k;
      lld[k] = kids.empty() ? k : lld[post_of[kids.front()]];
      stack.pop_back();
    }
    std::vector<bool> seen(n + 1, false);
    for (std::size_t i = n; i >= 1; --i) {
      if (!seen[lld[i]]) {
        keyroots.push_back(i);
        seen[lld[i]] = true;
      }
    }
    std::reverse(keyroots.begin(), keyroots.end());
  }
};

}  // namespace

std::string_view to_string(TableTag tag) noexcept {
  switch (tag) {
    case TableTag::Table: return "table";
    case TableTag::Thead: return "thead";
    case TableTag::Tbody: return "tbody";
    case TableTag::Tr: return "tr";
    case TableTag::Td: return "td";
  }
  return "";
}

TableTree parse_table(std::string_view markup, const TableParseOptions& opts) {
  std::string_view trimmed = trim(markup);
  bool html = (!trimmed.empty() && trimmed.front() == '<') || contains_ci(trimmed, "<table") ||
              contains_ci(trimmed, "<tr") || contains_ci(trimmed, "<td");
  TableTree tree;
  bool has_rows = false;
  if (html) {
    HtmlTableBuilder builder(opts);
    tree = builder.build(markup);
    has_rows = builder.has_rows();
  } else {
    tree = parse_markdown(markup);
    has_rows = !tree.root().children.empty();
  }
  if (!has_rows) throw Error(ErrorCode::MalformedTable, "MalformedTable: no table row could be recovered");
  return tree;
}

std::string describe(const TableTree& t) {
  std::string out;
  auto rec = [&](auto&& self, std::size_t id) -> void {
    const TableNode& n = t.nodes[id];
    out += to_string(n.tag);
    if (n.tag == TableTag::Td) {
      if (n.header) out += "[th]";
      if (n.rowspan != 1) out += "[rowspan=" + std::to_string(n.rowspan) + "]";
      if (n.colspan != 1) out += "[colspan=" + std::to_string(n.colspan) + "]";
      out += '"' + n.text + '"';
    }
    if (!n.children.empty()) {
      out += '(';
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (i) out += ',';
        self(self, n.children[i]);
      }
      out += ')';
    }
  };
  if (!t.nodes.empty()) rec(rec, 0);
  return out;
}

double rename_cost(const TableNode& a, const TableNode& b, TedMode mode) {
  if (a.tag != b.tag) return 1.0;
  if (a.tag != TableTag::Td) return 0.0;
  if (a.header != b.header || a.rowspan != b.rowspan || a.colspan != b.colspan) return 1.0;
  if (mode == TedMode::StructureOnly) return 0.0;
  return ned(a.text, b.text);
}

double ted(const TableTree& a, const TableTree& b, TedMode mode) {
  const std::size_t n1 = a.size();
  const std::size_t n2 = b.size();
  if (n1 == 0) return static_cast<double>(n2);
  if (n2 == 0) return static_cast<double>(n1);

  Postorder pa(a);
  Postorder pb(b);

  std::vector<std::u32string> text_a, text_b;
  if (mode == TedMode::Content) {
    TextNormConfig cfg;
    text_a.resize(n1);
    text_b.resize(n2);
    for (std::size_t i = 0; i < n1; ++i)
      if (a.nodes[i].tag == TableTag::Td) text_a[i] = normalize_text(a.nodes[i].text, cfg);
    for (std::size_t j = 0; j < n2; ++j)
      if (b.nodes[j].tag == TableTag::Td) text_b[j] = normalize_text(b.nodes[j].text, cfg);
  }
  auto cost = [&](std::size_t x, std::size_t y) {
    std::size_t ia = pa.node[x];
    std::size_t ib = pb.node[y];
    const TableNode& na = a.nodes[ia];
    const TableNode& nb = b.nodes[ib];
    if (mode == TedMode::Content && na.tag == TableTag::Td && nb.tag == TableTag::Td &&
        na.header == nb.header && na.rowspan == nb.rowspan && na.colspan == nb.colspan)
      return ned(std::u32string_view(text_a[ia]), std::u32string_view(text_b[ib]));
    return rename_cost(na, nb, TedMode::StructureOnly);
  };

  const std::size_t w = n2 + 1;
  std::vector<double> treedist((n1 + 1) * w, 0.0);
  std::vector<double> fd((n1 + 1) * w, 0.0);
  auto TD = [&](std::size_t x, std::size_t y) -> double& { return treedist[x * w + y]; };
  auto FD = [&](std::size_t x, std::size_t y) -> double& { return fd[x * w + y]; };

  for (std::size_t i : pa.keyroots) {
    for (std::size_t j : pb.keyroots) {
      const std::size_t li = pa.lld[i];
      const std::size_t lj = pb.lld[j];
      FD(li - 1, lj - 1) = 0.0;
      for (std::size_t x = li; x <= i; ++x) FD(x, lj - 1) = FD(x - 1, lj - 1) + 1.0;
      for (std::size_t y = lj; y <= j; ++y) FD(li - 1, y) = FD(li - 1, y - 1) + 1.0;
      for (std::size_t x = li; x <= i; ++x) {
        for (std::size_t y = lj; y <= j; ++y) {
          const double del = FD(x - 1, y) + 1.0;
          const double ins = FD(x, y - 1) + 1.0;
          if (pa.lld[x] == li && pb.lld[y] == lj) {
            const double ren = FD(x - 1, y - 1) + cost(x, y);
            FD(x, y) = std::min({del, ins, ren});
            TD(x, y) = FD(x, y);
          } else {
            const double sub = FD(pa.lld[x] - 1, pb.lld[y] - 1) + TD(x, y);
            FD(x, y) = std::min({del, ins, sub});
          }
        }
      }
    }
  }
  return TD(n1, n2);
}

double teds(const TableTree& pred, const TableTree& gt, bool structure_only, std::size_t node_cap) {
  const std::size_t n = std::max(pred.size(), gt.size());
  if (n == 0) return 1.0;
  bool over_cap = pred.size() > node_cap || gt.size() > node_cap;
  TedMode mode = structure_only || over_cap ? TedMode::StructureOnly : TedMode::Content;
  double score = 1.0 - ted(pred, gt, mode) / static_cast<double>(n);
  return std::clamp(score, 0.0, 1.0);
}

double table_reward(const std::vector<std::string>& pred_tables, const std::vector<std::string>& gt_tables,
                    const TableConfig& cfg, bool structure_only) {
  const std::size_t slots = std::max(pred_tables.size(), gt_tables.size());
  if (slots == 0) return 1.0;
  TableParseOptions opts{cfg.keep_wrappers};
  double sum = 0.0;
  for (std::size_t i = 0; i < std::min(pred_tables.size(), gt_tables.size()); ++i) {
    TableTree gt;
    try {
      gt = parse_table(gt_tables[i], opts);
    } catch (const Error&) {
      // A ground-truth table that cannot be parsed can only be matched verbatim.
      sum += pred_tables[i] == gt_tables[i] ? 1.0 : 0.0;
      continue;
    }
    try {
      sum += teds(parse_table(pred_tables[i], opts), gt, structure_only, cfg.node_cap);
    } catch (const Error&) {
    }
  }
  return sum / static_cast<double>(slots);
}

double table_reward(const std::vector<const Segment*>& pred_tables, const std::vector<const Segment*>& gt_tables,
                    const TableConfig& cfg, bool structure_only) {
  auto contents = [](const std::vector<const Segment*>& segs) {
    std::vector<std::string> out;
    out.reserve(segs.size());
    for (const Segment* s : segs) out.push_back(s->content);
    return out;
  };
  return table_reward(contents(pred_tables), contents(gt_tables), cfg, structure_only);
}

}  // namespace fdr
