#include "fdr/segmenter.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "fdr/text_metrics.hpp"
#include "fdr/utf8.hpp"

namespace fdr {

namespace {

struct Claim {
  std::size_t start;
  std::size_t end;
  SegmentKind kind;
  std::size_t body_start;
  std::size_t body_end;
};

class Scanner {
 public:
  explicit Scanner(std::string_view src) : s_(src) {}

  std::vector<Claim> run() {
    claim_code_fences();
    for_each_gap([this](std::size_t a, std::size_t b) { claim_html_tables(a, b); });
    for_each_gap([this](std::size_t a, std::size_t b) { claim_pipe_tables(a, b); });
    for_each_gap([this](std::size_t a, std::size_t b) { claim_display_math(a, b); });
    for_each_gap([this](std::size_t a, std::size_t b) { claim_inline_math(a, b); });
    return std::move(claims_);
  }

 private:
  std::string_view s_;
  std::vector<Claim> claims_;
  std::vector<Claim> pending_;

  template <class Fn>
  void for_each_gap(Fn&& fn) {
    std::size_t pos = 0;
    for (const auto& c : claims_) {
      if (c.start > pos) fn(pos, c.start);
      pos = c.end;
    }
    if (pos < s_.size()) fn(pos, s_.size());
    claims_.insert(claims_.end(), pending_.begin(), pending_.end());
    pending_.clear();
    std::sort(claims_.begin(), claims_.end(), [](const Claim& x, const Claim& y) { return x.start < y.start; });
  }

  void add(std::size_t start, std::size_t end, SegmentKind kind, std::size_t bs, std::size_t be) {
    pending_.push_back({start, end, kind, bs, be});
  }

  bool escaped(std::size_t p) const {
    std::size_t n = 0;
    while (p > n && s_[p - n - 1] == '\\') ++n;
    return n % 2 == 1;
  }

  bool starts_with(std::size_t p, std::size_t limit, std::string_view lit) const {
    return p + lit.size() <= limit && s_.compare(p, lit.size(), lit) == 0;
  }

  bool starts_with_ci(std::size_t p, std::size_t limit, std::string_view lit) const {
    if (p + lit.size() > limit) return false;
    for (std::size_t i = 0; i < lit.size(); ++i) {
      if (std::tolower(static_cast<unsigned char>(s_[p + i])) != lit[i]) return false;
    }
    return true;
  }

  bool blank(std::size_t a, std::size_t b) const { return is_blank(s_.substr(a, b - a)); }

  std::size_t dollar_run(std::size_t p, std::size_t limit) const {
    std::size_t q = p;
    while (q < limit && s_[q] == '$') ++q;
    return q - p;
  }

  // 1. ``` fences. Claimed as plain text.
  void claim_code_fences() {
    std::size_t p = 0;
    while (true) {
      std::size_t open = s_.find("```", p);
      if (open == std::string_view::npos) break;
      std::size_t close = s_.find("```", open + 3);
      if (close == std::string_view::npos) break;
      add(open, close + 3, SegmentKind::PlainText, open, close + 3);
      p = close + 3;
    }
    for_each_gap([](std::size_t, std::size_t) {});
  }

  bool table_open_at(std::size_t p, std::size_t limit) const {
    if (!starts_with_ci(p, limit, "<table")) return false;
    if (p + 6 == limit) return false;
    char c = s_[p + 6];
    return c == '>' || c == '/' || utf8::is_ascii_space(c);
  }

  bool table_close_at(std::size_t p, std::size_t limit) const {
    if (!starts_with_ci(p, limit, "</table")) return false;
    if (p + 7 == limit) return false;
    char c = s_[p + 7];
    return c == '>' || utf8::is_ascii_space(c);
  }

  // 2. <table> ... </table>
  void claim_html_tables(std::size_t a, std::size_t b) {
    std::size_t p = a;
    while (p < b) {
      if (s_[p] != '<' || !table_open_at(p, b)) {
        ++p;
        continue;
      }
      int depth = 1;
      std::size_t q = p + 6;
      std::size_t end = 0;
      while (q < b) {
        if (s_[q] == '<') {
          if (table_open_at(q, b)) {
            ++depth;
            q += 6;
            continue;
          }
          if (table_close_at(q, b)) {
            std::size_t gt = s_.find('>', q + 7);
            if (gt == std::string_view::npos || gt >= b) break;
            if (--depth == 0) {
              end = gt + 1;
              break;
            }
            q = gt + 1;
            continue;
          }
        }
        ++q;
      }
      if (end != 0) {
        add(p, end, SegmentKind::Table, p, end);
        p = end;
      } else {
        p += 6;
      }
    }
  }

  bool is_pipe_line(std::size_t ls, std::size_t le) const {
    std::size_t i = ls;
    while (i < le && (s_[i] == ' ' || s_[i] == '\t')) ++i;
    return i < le && s_[i] == '|';
  }

  bool is_separator_line(std::size_t ls, std::size_t le) const {
    std::size_t i = ls;
    while (i < le && (s_[i] == ' ' || s_[i] == '\t')) ++i;
    if (i >= le || s_[i] != '|') return false;
    bool dash = false;
    for (; i < le; ++i) {
      char c = s_[i];
      if (c == '-') dash = true;
      else if (c != ':' && c != '|' && c != ' ' && c != '\t' && c != '\r') return false;
    }
    return dash;
  }

  // 3. Markdown pipe tables, whole lines only.
  void claim_pipe_tables(std::size_t a, std::size_t b) {
    struct Line {
      std::size_t start, end;
    };
    std::vector<Line> lines;
    std::size_t ls = a;
    while (ls < b) {
      std::size_t nl = s_.find('\n', ls);
      std::size_t le = nl == std::string_view::npos ? s_.size() : nl;
      bool line_start = ls == 0 || s_[ls - 1] == '\n';
      if (le > b) break;  // line runs into a claimed region
      if (line_start) lines.push_back({ls, le});
      if (nl == std::string_view::npos) break;
      ls = nl + 1;
    }
    std::size_t k = 0;
    while (k + 1 < lines.size()) {
      const Line& head = lines[k];
      const Line& sep = lines[k + 1];
      bool adjacent = sep.start == head.end + 1;
      if (!adjacent || !is_pipe_line(head.start, head.end) || !is_separator_line(sep.start, sep.end)) {
        ++k;
        continue;
      }
      std::size_t last = k + 1;
      while (last + 1 < lines.size() && lines[last + 1].start == lines[last].end + 1 &&
             is_pipe_line(lines[last + 1].start, lines[last + 1].end))
        ++last;
      std::size_t end = lines[last].end;
      if (end > head.start && s_[end - 1] == '\r') --end;
      add(head.start, end, SegmentKind::Table, head.start, end);
      k = last + 1;
    }
  }

  static constexpr std::array<std::string_view, 3> kDisplayEnvs = {"equation", "align", "align*"};

  // 4. display math
  void claim_display_math(std::size_t a, std::size_t b) {
    std::size_t p = a;
    while (p < b) {
      char c = s_[p];
      if (c == '$' && !escaped(p)) {
        std::size_t run = dollar_run(p, b);
        if (run != 2) {
          p += run;
          continue;
        }
        std::size_t q = p + 2;
        std::size_t close = std::string_view::npos;
        while (q < b) {
          if (s_[q] == '$' && !escaped(q)) {
            std::size_t r = dollar_run(q, b);
            if (r >= 2) {
              close = q;
              break;
            }
            q += r;
            continue;
          }
          ++q;
        }
        if (close != std::string_view::npos && !blank(p + 2, close)) {
          add(p, close + 2, SegmentKind::Formula, p + 2, close);
          p = close + 2;
        } else {
          p += 2;
        }
        continue;
      }
      if (c == '\\' && !escaped(p)) {
        if (starts_with(p, b, "\\[")) {
          std::size_t q = p + 2;
          std::size_t close = std::string_view::npos;
          while (q + 1 < b) {
            if (s_[q] == '\\' && s_[q + 1] == ']' && !escaped(q)) {
              close = q;
              break;
            }
            ++q;
          }
          if (close != std::string_view::npos && !blank(p + 2, close)) {
            add(p, close + 2, SegmentKind::Formula, p + 2, close);
            p = close + 2;
          } else {
            p += 2;
          }
          continue;
        }
        bool matched = false;
        for (std::string_view env : kDisplayEnvs) {
          std::string open = "\\begin{" + std::string(env) + "}";
          if (!starts_with(p, b, open)) continue;
          std::string close_tok = "\\end{" + std::string(env) + "}";
          std::size_t close = s_.substr(0, b).find(close_tok, p + open.size());
          if (close != std::string_view::npos && !blank(p + open.size(), close)) {
            add(p, close + close_tok.size(), SegmentKind::Formula, p + open.size(), close);
            p = close + close_tok.size();
          } else {
            p += open.size();
          }
          matched = true;
          break;
        }
        if (!matched) p += 2;
        continue;
      }
      ++p;
    }
  }

  // 5. inline math
  void claim_inline_math(std::size_t a, std::size_t b) {
    std::size_t p = a;
    while (p < b) {
      char c = s_[p];
      if (c == '$' && !escaped(p)) {
        std::size_t run = dollar_run(p, b);
        if (run != 1) {
          p += run;
          continue;
        }
        std::size_t q = p + 1;
        std::size_t close = std::string_view::npos;
        while (q < b && s_[q] != '\n') {
          if (s_[q] == '$' && !escaped(q)) {
            close = q;
            break;
          }
          ++q;
        }
        if (close != std::string_view::npos && !blank(p + 1, close)) {
          add(p, close + 1, SegmentKind::Formula, p + 1, close);
          p = close + 1;
        } else {
          p += 1;
        }
        continue;
      }
      if (c == '\\' && !escaped(p)) {
        if (starts_with(p, b, "\\(")) {
          std::size_t q = p + 2;
          std::size_t close = std::string_view::npos;
          while (q + 1 < b) {
            if (s_[q] == '\\' && s_[q + 1] == ')' && !escaped(q)) {
              close = q;
              break;
            }
            ++q;
          }
          if (close != std::string_view::npos && !blank(p + 2, close)) {
            add(p, close + 2, SegmentKind::Formula, p + 2, close);
            p = close + 2;
          } else {
            p += 2;
          }
          continue;
        }
        p += 2;
        continue;
      }
      ++p;
    }
  }
};

std::size_t non_ws_bytes(std::string_view s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char c) { return !utf8::is_ascii_space(c); }));
}

}  // namespace

SegmentedDoc segment(std::string_view doc) {
  SegmentedDoc out;
  out.source = std::string(doc);
  std::vector<Claim> claims = Scanner(doc).run();

  auto push_plain = [&](std::size_t a, std::size_t b) {
    if (a >= b) return;
    if (!out.segments.empty() && out.segments.back().kind == SegmentKind::PlainText &&
        out.segments.back().span.end == a) {
      out.segments.back().span.end = b;
      out.segments.back().content.append(doc.substr(a, b - a));
      return;
    }
    out.segments.push_back({SegmentKind::PlainText, std::string(doc.substr(a, b - a)), {a, b}});
  };

  std::size_t pos = 0;
  for (const auto& c : claims) {
    push_plain(pos, c.start);
    if (c.kind == SegmentKind::PlainText) {
      push_plain(c.start, c.end);
    } else {
      out.segments.push_back(
          {c.kind, std::string(doc.substr(c.body_start, c.body_end - c.body_start)), {c.start, c.end}});
    }
    pos = c.end;
  }
  push_plain(pos, doc.size());
  return out;
}

TypeProfile type_profile(const SegmentedDoc& doc) {
  TypeProfile p;
  std::size_t formatted = 0;
  std::size_t total = 0;
  for (const auto& seg : doc.segments) {
    std::size_t n = non_ws_bytes(seg.content);
    total += n;
    if (seg.kind == SegmentKind::Formula) {
      p.has_formula = true;
      formatted += n;
    } else if (seg.kind == SegmentKind::Table) {
      p.has_table = true;
      formatted += n;
    }
  }
  p.formatted_ratio = total == 0 ? 0.0 : static_cast<double>(formatted) / static_cast<double>(total);
  return p;
}

TypeProfile type_profile(std::string_view doc) { return type_profile(segment(doc)); }

std::vector<const Segment*> segments_of(const SegmentedDoc& doc, SegmentKind kind) {
  std::vector<const Segment*> out;
  for (const auto& seg : doc.segments)
    if (seg.kind == kind) out.push_back(&seg);
  return out;
}

std::string join_contents(const SegmentedDoc& doc, SegmentKind kind, std::string_view sep) {
  std::string out;
  bool first = true;
  for (const auto& seg : doc.segments) {
    if (seg.kind != kind) continue;
    if (!first) out.append(sep);
    out.append(seg.content);
    first = false;
  }
  return out;
}

}  // namespace fdr
