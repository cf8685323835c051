#include "ebpd/sexpr.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace ebpd {

std::string SourceSpan::str() const {
  std::ostringstream os;
  os << (file.empty() ? "<input>" : file) << ':' << line << ':' << col;
  return os.str();
}

std::string SExpr::str() const {
  if (!is_list) return symbol;
  std::string out = "(";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ' ';
    out += items[i].str();
  }
  out += ')';
  return out;
}

namespace {

class Reader {
 public:
  Reader(const std::string& text, std::string file)
      : text_(text), file_(std::move(file)) {}

  std::vector<SExpr> read_all() {
    std::vector<SExpr> out;
    skip_space();
    while (!eof()) {
      out.push_back(read_expr());
      skip_space();
    }
    return out;
  }

 private:
  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  SourceSpan here() const { return SourceSpan{file_, line_, col_}; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (!eof()) {
      char c = peek();
      if (c == ';') {
        while (!eof() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  SExpr read_expr() {
    SourceSpan start = here();
    char c = peek();
    if (c == '(') {
      advance();
      SExpr list;
      list.is_list = true;
      list.span = start;
      skip_space();
      while (!eof() && peek() != ')') {
        list.items.push_back(read_expr());
        skip_space();
      }
      if (eof()) throw ParseError("unterminated list", start);
      advance();  // ')'
      return list;
    }
    if (c == ')') throw ParseError("unexpected ')'", start);
    SExpr sym;
    sym.span = start;
    while (!eof()) {
      c = peek();
      if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == ';') break;
      sym.symbol += c;
      advance();
    }
    return sym;
  }

  const std::string& text_;
  std::string file_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

std::vector<SExpr> parse_sexprs(const std::string& text, const std::string& filename) {
  return Reader(text, filename).read_all();
}

std::vector<SExpr> parse_sexpr_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file", SourceSpan{path, 0, 0});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_sexprs(buf.str(), path);
}

}  // namespace ebpd
