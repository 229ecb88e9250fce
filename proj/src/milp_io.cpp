#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "flpbd/milp.hpp"

namespace flpbd::milp {
namespace {

// Shortest text that parses back to the same double.
std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_number(std::string_view text, const std::string& where) {
  double v = 0.0;
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    // from_chars rejects "inf"/"Infinity"; models never contain them.
    throw InputError(where + ": bad number '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string t; ss >> t;) out.push_back(t);
  return out;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

char sense_letter(Sense s) {
  switch (s) {
    case Sense::kLessEqual: return 'L';
    case Sense::kGreaterEqual: return 'G';
    case Sense::kEqual: return 'E';
  }
  return 'E';
}

const char* sense_op(Sense s) {
  switch (s) {
    case Sense::kLessEqual: return "<=";
    case Sense::kGreaterEqual: return ">=";
    case Sense::kEqual: return "=";
  }
  return "=";
}

// Column-major view of the rows: (row, coef) per column in row order.
std::vector<std::vector<std::pair<int, double>>> transpose(const MilpModel& model) {
  std::vector<std::vector<std::pair<int, double>>> cols(model.num_variables());
  const auto& rows = model.constraints();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (const auto& t : rows[r].terms) cols[t.column].emplace_back(static_cast<int>(r), t.coef);
  }
  return cols;
}

// Collects columns, rows and their terms while reading; builds the model at
// the end so column order is first appearance order.
struct Assembler {
  std::vector<Variable> vars;
  std::unordered_map<std::string, int> var_id;
  struct Row {
    std::string name;
    Sense sense = Sense::kLessEqual;
    double rhs = 0.0;
    std::vector<Term> terms;
  };
  std::vector<Row> rows;
  std::unordered_map<std::string, int> row_id;

  int column(const std::string& name) {
    auto [it, inserted] = var_id.emplace(name, static_cast<int>(vars.size()));
    if (inserted) vars.push_back({name, VarKind::kContinuous, 0.0});
    return it->second;
  }

  MilpModel build(std::string name) {
    MilpModel model(std::move(name));
    for (const auto& v : vars) model.add_variable(v.name, v.kind, v.objective);
    for (auto& r : rows) model.add_constraint(r.name, std::move(r.terms), r.sense, r.rhs);
    return model;
  }
};

}  // namespace

void write_mps(const MilpModel& model, std::ostream& out) {
  const auto& vars = model.variables();
  const auto& rows = model.constraints();
  out << "NAME          " << model.name() << "\n";
  out << "ROWS\n";
  out << " N  obj\n";
  for (const auto& r : rows) out << ' ' << sense_letter(r.sense) << "  " << r.name << "\n";
  out << "COLUMNS\n";
  const auto cols = transpose(model);
  bool in_int = false;
  int marker = 0;
  auto emit_marker = [&](const char* kind) {
    out << "    " << pad("MARKER" + std::to_string(marker++), 8) << "  'MARKER'"
        << "                 '" << kind << "'\n";
  };
  for (std::size_t k = 0; k < vars.size(); ++k) {
    const bool is_int = vars[k].kind == VarKind::kBinary;
    if (is_int != in_int) {
      emit_marker(is_int ? "INTORG" : "INTEND");
      in_int = is_int;
    }
    const std::string name = pad(vars[k].name, 8);
    if (vars[k].objective != 0.0 || cols[k].empty()) {
      out << "    " << name << "  " << pad("obj", 8) << "  " << fmt(vars[k].objective) << "\n";
    }
    for (const auto& [r, coef] : cols[k]) {
      out << "    " << name << "  " << pad(rows[r].name, 8) << "  " << fmt(coef) << "\n";
    }
  }
  if (in_int) emit_marker("INTEND");
  out << "RHS\n";
  for (const auto& r : rows) {
    if (r.rhs != 0.0) out << "    RHS       " << pad(r.name, 8) << "  " << fmt(r.rhs) << "\n";
  }
  out << "BOUNDS\n";
  for (const auto& v : vars) {
    if (v.kind == VarKind::kBinary) out << " BV BND       " << v.name << "\n";
  }
  out << "ENDATA\n";
}

MilpModel read_mps(std::istream& in) {
  enum class Section { kNone, kRows, kColumns, kRhs, kRanges, kBounds, kEnd };
  Section section = Section::kNone;
  Assembler as;
  std::string model_name = "flpbd";
  std::string objective_row;
  bool integer_block = false;
  std::unordered_set<int> int_columns;
  std::string line;
  std::size_t line_no = 0;
  auto where = [&] { return "MPS line " + std::to_string(line_no); };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '*') continue;
    auto tok = tokens(line);
    if (tok.empty()) continue;
    if (line[0] != ' ' && line[0] != '\t') {
      const std::string& key = tok[0];
      if (key == "NAME") {
        if (tok.size() > 1) model_name = tok[1];
        section = Section::kNone;
      } else if (key == "ROWS") {
        section = Section::kRows;
      } else if (key == "COLUMNS") {
        section = Section::kColumns;
      } else if (key == "RHS") {
        section = Section::kRhs;
      } else if (key == "RANGES") {
        throw InputError(where() + ": RANGES are not supported");
      } else if (key == "BOUNDS") {
        section = Section::kBounds;
      } else if (key == "ENDATA") {
        section = Section::kEnd;
        break;
      } else if (key == "OBJSENSE") {
        throw InputError(where() + ": OBJSENSE is not supported");
      } else {
        throw InputError(where() + ": unknown section " + key);
      }
      continue;
    }
    switch (section) {
      case Section::kRows: {
        if (tok.size() != 2) throw InputError(where() + ": malformed row");
        const std::string& type = tok[0];
        if (type == "N") {
          if (objective_row.empty()) objective_row = tok[1];
          continue;
        }
        Sense s;
        if (type == "L") s = Sense::kLessEqual;
        else if (type == "G") s = Sense::kGreaterEqual;
        else if (type == "E") s = Sense::kEqual;
        else throw InputError(where() + ": unknown row type " + type);
        if (as.row_id.count(tok[1])) throw InputError(where() + ": duplicate row " + tok[1]);
        as.row_id.emplace(tok[1], static_cast<int>(as.rows.size()));
        as.rows.push_back({tok[1], s, 0.0, {}});
        break;
      }
      case Section::kColumns: {
        if (tok.size() >= 3 && tok[1] == "'MARKER'") {
          if (tok[2] == "'INTORG'") integer_block = true;
          else if (tok[2] == "'INTEND'") integer_block = false;
          else throw InputError(where() + ": unknown marker " + tok[2]);
          continue;
        }
        if (tok.size() != 3 && tok.size() != 5) throw InputError(where() + ": malformed column entry");
        const int c = as.column(tok[0]);
        if (integer_block) int_columns.insert(c);
        for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
          const double v = parse_number(tok[k + 1], where());
          if (tok[k] == objective_row) {
            as.vars[c].objective += v;
          } else {
            auto it = as.row_id.find(tok[k]);
            if (it == as.row_id.end()) throw InputError(where() + ": unknown row " + tok[k]);
            as.rows[it->second].terms.push_back({c, v});
          }
        }
        break;
      }
      case Section::kRhs: {
        if (tok.size() != 3 && tok.size() != 5) throw InputError(where() + ": malformed RHS entry");
        for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
          const double v = parse_number(tok[k + 1], where());
          if (tok[k] == objective_row) continue;
          auto it = as.row_id.find(tok[k]);
          if (it == as.row_id.end()) throw InputError(where() + ": unknown row " + tok[k]);
          as.rows[it->second].rhs = v;
        }
        break;
      }
      case Section::kBounds: {
        if (tok.size() < 3) throw InputError(where() + ": malformed bound");
        auto it = as.var_id.find(tok[2]);
        if (it == as.var_id.end()) throw InputError(where() + ": unknown column " + tok[2]);
        const std::string& type = tok[0];
        const double v = tok.size() > 3 ? parse_number(tok[3], where()) : 0.0;
        if (type == "BV" || (type == "UP" && v == 1.0 && int_columns.count(it->second))) {
          int_columns.insert(it->second);
          as.vars[it->second].kind = VarKind::kBinary;
        } else if (type == "LO" && v == 0.0) {
          // default
        } else if (type == "PL") {
          // default
        } else {
          throw InputError(where() + ": unsupported bound " + type + " on " + tok[2]);
        }
        break;
      }
      default:
        throw InputError(where() + ": data outside a section");
    }
  }
  if (section != Section::kEnd) throw InputError("MPS file lacks ENDATA");
  for (int c : int_columns) {
    if (as.vars[c].kind != VarKind::kBinary) {
      throw InputError("integer column " + as.vars[c].name + " has no binary bound");
    }
  }
  return as.build(model_name);
}

void write_lp(const MilpModel& model, std::ostream& out) {
  const auto& vars = model.variables();
  constexpr int kPerLine = 6;
  auto term = [&](double coef, const std::string& name, bool first) {
    std::string s;
    if (coef < 0) s = first ? "-" : "- ";
    else if (!first) s = "+ ";
    const double a = std::abs(coef);
    if (a != 1.0) s += fmt(a) + " ";
    return s + name;
  };
  out << "\\ Model " << model.name() << "\n";
  out << "Minimize\n obj:";
  // Every column appears here, zeros included, so a reader recovers the
  // declaration order from first appearance.
  for (std::size_t k = 0; k < vars.size(); ++k) {
    if (k % kPerLine == 0 && k > 0) out << "\n  ";
    const double c = vars[k].objective;
    out << ' ' << (c == 0.0 ? (k == 0 ? "0 " : "+ 0 ") + vars[k].name : term(c, vars[k].name, k == 0));
  }
  out << "\nSubject To\n";
  for (const auto& r : model.constraints()) {
    out << ' ' << r.name << ':';
    if (r.terms.empty()) out << " 0 " << vars.front().name;
    for (std::size_t k = 0; k < r.terms.size(); ++k) {
      if (k % kPerLine == 0 && k > 0) out << "\n  ";
      out << ' ' << term(r.terms[k].coef, vars[r.terms[k].column].name, k == 0);
    }
    out << ' ' << sense_op(r.sense) << ' ' << fmt(r.rhs) << "\n";
  }
  out << "Binaries\n";
  std::size_t on_line = 0;
  for (const auto& v : vars) {
    if (v.kind != VarKind::kBinary) continue;
    out << ' ' << v.name;
    if (++on_line % 8 == 0) out << "\n";
  }
  if (on_line % 8 != 0) out << "\n";
  out << "End\n";
}

namespace {

struct LpToken {
  enum Kind { kName, kNumber, kSign, kColon, kOp, kEnd } kind = kEnd;
  std::string text;
};

class LpLexer {
 public:
  explicit LpLexer(std::string_view text) : s_(text) {}

  LpToken next() {
    skip();
    if (pos_ >= s_.size()) return {LpToken::kEnd, ""};
    const char c = s_[pos_];
    if (c == '+' || c == '-') {
      ++pos_;
      return {LpToken::kSign, std::string(1, c)};
    }
    if (c == ':') {
      ++pos_;
      return {LpToken::kColon, ":"};
    }
    if (c == '<' || c == '>' || c == '=') {
      std::size_t start = pos_++;
      if (pos_ < s_.size() && (s_[pos_] == '=' || s_[pos_] == '<' || s_[pos_] == '>')) ++pos_;
      std::string op(s_.substr(start, pos_ - start));
      if (op == "=<" || op == "<") op = "<=";
      if (op == "=>" || op == ">") op = ">=";
      if (op == "==") op = "=";
      return {LpToken::kOp, op};
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) ||
                                  s_[pos_] == '.' || s_[pos_] == 'e' || s_[pos_] == 'E' ||
                                  ((s_[pos_] == '+' || s_[pos_] == '-') &&
                                   (s_[pos_ - 1] == 'e' || s_[pos_ - 1] == 'E')))) {
        ++pos_;
      }
      return {LpToken::kNumber, std::string(s_.substr(start, pos_ - start))};
    }
    std::size_t start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) &&
           std::string_view("+-:<>=").find(s_[pos_]) == std::string_view::npos) {
      ++pos_;
    }
    return {LpToken::kName, std::string(s_.substr(start, pos_ - start))};
  }

 private:
  void skip() {
    while (pos_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(s_[pos_]))) {
        ++pos_;
      } else if (s_[pos_] == '\\') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return s;
}

}  // namespace

MilpModel read_lp(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  std::string model_name = "flpbd";
  if (constexpr std::string_view head = "\\ Model "; text.starts_with(head)) {
    const auto eol = text.find('\n');
    model_name = text.substr(head.size(), eol == std::string::npos ? eol : eol - head.size());
  }
  LpLexer lex(text);
  Assembler as;
  std::vector<LpToken> toks;
  for (LpToken t = lex.next(); t.kind != LpToken::kEnd; t = lex.next()) toks.push_back(t);

  enum class Section { kNone, kObjective, kRows, kBounds, kBinaries, kEnd };
  Section section = Section::kNone;
  std::size_t k = 0;
  auto peek_keyword = [&]() -> std::pair<Section, std::size_t> {
    if (k >= toks.size() || toks[k].kind != LpToken::kName) return {Section::kNone, 0};
    const std::string w = lower(toks[k].text);
    const std::string w2 = k + 1 < toks.size() ? lower(toks[k + 1].text) : "";
    if (w == "minimize" || w == "minimum" || w == "min") return {Section::kObjective, 1};
    if (w == "maximize" || w == "maximum" || w == "max") {
      throw InputError("LP: maximization is not supported");
    }
    if (w == "subject" && w2 == "to") return {Section::kRows, 2};
    if (w == "such" && w2 == "that") return {Section::kRows, 2};
    if (w == "st" || w == "s.t.") return {Section::kRows, 1};
    if (w == "bounds" || w == "bound") return {Section::kBounds, 1};
    if (w == "binaries" || w == "binary" || w == "bin") return {Section::kBinaries, 1};
    if (w == "general" || w == "generals" || w == "gen" || w == "semi-continuous") {
      throw InputError("LP: section " + toks[k].text + " is not supported");
    }
    if (w == "end") return {Section::kEnd, 1};
    return {Section::kNone, 0};
  };

  // Parses "[label:] expr" up to a comparison operator or a keyword.
  auto parse_expr = [&](std::string* label, std::vector<Term>& terms) {
    if (k + 1 < toks.size() && toks[k].kind == LpToken::kName && toks[k + 1].kind == LpToken::kColon) {
      if (label) *label = toks[k].text;
      k += 2;
    }
    double sign = 1.0;
    double coef = 1.0;
    bool have_coef = false;
    while (k < toks.size()) {
      const auto& t = toks[k];
      if (t.kind == LpToken::kOp) break;
      if (t.kind == LpToken::kName && peek_keyword().first != Section::kNone) break;
      if (t.kind == LpToken::kSign) {
        if (t.text == "-") sign = -sign;
      } else if (t.kind == LpToken::kNumber) {
        coef = parse_number(t.text, "LP");
        have_coef = true;
      } else if (t.kind == LpToken::kName) {
        terms.push_back({as.column(t.text), sign * coef});
        sign = 1.0;
        coef = 1.0;
        have_coef = false;
      } else {
        throw InputError("LP: unexpected '" + t.text + "'");
      }
      ++k;
    }
    if (have_coef && coef != 0.0) throw InputError("LP: constant terms are not supported");
  };

  while (k < toks.size()) {
    auto [next, width] = peek_keyword();
    if (next != Section::kNone) {
      section = next;
      k += width;
      if (section == Section::kEnd) break;
      continue;
    }
    switch (section) {
      case Section::kObjective: {
        std::vector<Term> terms;
        parse_expr(nullptr, terms);
        for (const auto& t : terms) as.vars[t.column].objective += t.coef;
        break;
      }
      case Section::kRows: {
        Assembler::Row row;
        row.name = "r" + std::to_string(as.rows.size());
        parse_expr(&row.name, row.terms);
        if (k + 1 >= toks.size() || toks[k].kind != LpToken::kOp) {
          throw InputError("LP: row " + row.name + " lacks a comparison");
        }
        const std::string op = toks[k++].text;
        row.sense = op == "<=" ? Sense::kLessEqual : op == ">=" ? Sense::kGreaterEqual : Sense::kEqual;
        double rsign = 1.0;
        if (toks[k].kind == LpToken::kSign) {
          if (toks[k].text == "-") rsign = -1.0;
          ++k;
        }
        if (k >= toks.size() || toks[k].kind != LpToken::kNumber) {
          throw InputError("LP: row " + row.name + " lacks a right-hand side");
        }
        row.rhs = rsign * parse_number(toks[k++].text, "LP");
        if (as.row_id.count(row.name)) throw InputError("LP: duplicate row " + row.name);
        as.row_id.emplace(row.name, static_cast<int>(as.rows.size()));
        as.rows.push_back(std::move(row));
        break;
      }
      case Section::kBounds: {
        // Only "name >= 0" and "name <= 1" on binaries are representable.
        const std::string name = toks[k].text;
        if (k + 2 >= toks.size() || toks[k + 1].kind != LpToken::kOp ||
            toks[k + 2].kind != LpToken::kNumber) {
          throw InputError("LP: malformed bound on " + name);
        }
        const double v = parse_number(toks[k + 2].text, "LP");
        const std::string op = toks[k + 1].text;
        as.column(name);
        if (!(op == ">=" && v == 0.0) && !(op == "<=" && v == 1.0)) {
          throw InputError("LP: unsupported bound on " + name);
        }
        k += 3;
        break;
      }
      case Section::kBinaries: {
        if (toks[k].kind != LpToken::kName) throw InputError("LP: bad binary name");
        as.vars[as.column(toks[k].text)].kind = VarKind::kBinary;
        ++k;
        break;
      }
      default:
        throw InputError("LP: text outside a section near '" + toks[k].text + "'");
    }
  }
  if (section != Section::kEnd) throw InputError("LP file lacks End");
  return as.build(model_name);
}

void export_mps(const MilpModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  write_mps(model, out);
}

void export_lp(const MilpModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  write_lp(model, out);
}

MilpModel import_mps(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path.string());
  return read_mps(in);
}

MilpModel import_lp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path.string());
  return read_lp(in);
}

}  // namespace flpbd::milp
