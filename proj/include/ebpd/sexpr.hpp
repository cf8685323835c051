// Minimal s-expression reader/writer used by the .ebpd file formats.
// Symbols and lists only; ';' starts a comment running to end of line.
#ifndef EBPD_SEXPR_HPP
#define EBPD_SEXPR_HPP

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace ebpd {

struct SourceSpan {
  std::string file;
  int line = 0;  // 1-based
  int col = 0;   // 1-based

  std::string str() const;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, SourceSpan span)
      : std::runtime_error(span.str() + ": " + msg), span_(std::move(span)) {}
  const SourceSpan& span() const { return span_; }

 private:
  SourceSpan span_;
};

struct SExpr {
  bool is_list = false;
  std::string symbol;        // valid when !is_list
  std::vector<SExpr> items;  // valid when is_list
  SourceSpan span;

  bool is_symbol(const std::string& s) const { return !is_list && symbol == s; }
  std::string str() const;
};

// Parses a whole file content into its top-level forms.
std::vector<SExpr> parse_sexprs(const std::string& text, const std::string& filename);

// Reads and parses a file from disk.
std::vector<SExpr> parse_sexpr_file(const std::string& path);

}  // namespace ebpd

#endif
