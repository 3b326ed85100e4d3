#include "cpsor/dbn.hpp"

#include <cmath>
#include <sstream>

#include "cpsor/text_format.hpp"

namespace cpsor::dbn {
namespace {

constexpr int kProbabilityDigits = 12;

void write_structure(std::ostringstream& out, const DbnStructure& s) {
  out << "[nodes]\n";
  for (const auto& node : s.nodes) out << node.name << ' ' << node.cardinality << ' ' << to_string(node.layer) << '\n';
  out << "[intra_edges]\n";
  for (const auto& [u, v] : s.intra_edges) {
    out << s.nodes[static_cast<std::size_t>(u)].name << ' ' << s.nodes[static_cast<std::size_t>(v)].name << '\n';
  }
  out << "[inter_edges]\n";
  for (int i : s.inter_edges) out << s.nodes[static_cast<std::size_t>(i)].name << '\n';
}

void write_cpt(std::ostringstream& out, const DbnStructure& s, const Cpt& cpt, bool inter) {
  out << "cpt " << s.nodes[static_cast<std::size_t>(cpt.child)].name;
  if (!inter) {
    out << " parents";
    for (int p : cpt.parents) out << ' ' << s.nodes[static_cast<std::size_t>(p)].name;
  }
  out << '\n';
  const auto card = static_cast<std::size_t>(cpt.child_cardinality);
  for (std::size_t r = 0; r < cpt.rows(); ++r) {
    for (std::size_t k = 0; k < card; ++k) {
      if (k > 0) out << ' ';
      out << format_number(cpt.table[r * card + k], kProbabilityDigits);
    }
    out << '\n';
  }
}

struct Line {
  std::size_t number;
  std::vector<std::string> tokens;
};

std::vector<Line> tokenize(const std::string& text) {
  std::vector<Line> lines;
  std::size_t number = 0;
  for (const auto& raw : split(text, '\n')) {
    ++number;
    const auto body = trim(raw);
    if (body.empty() || body.front() == '#') continue;
    Line line{number, {}};
    for (const auto& tok : split(body, ' ')) {
      if (!tok.empty()) line.tokens.push_back(tok);
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

[[noreturn]] void fail(const Line& line, const std::string& what) {
  throw ParseError("line " + std::to_string(line.number) + ": " + what);
}

class Reader {
 public:
  explicit Reader(const std::string& text) : lines_(tokenize(text)) {}

  bool done() const { return pos_ >= lines_.size(); }
  const Line& peek() const { return lines_[pos_]; }
  const Line& next() {
    if (done()) throw ParseError("unexpected end of document");
    return lines_[pos_++];
  }
  bool at_section() const { return !done() && peek().tokens.front().front() == '['; }

  const Line& expect_key(const std::string& key, std::size_t n_values) {
    const Line& line = next();
    if (line.tokens.front() != key || line.tokens.size() != n_values + 1) fail(line, "expected '" + key + "'");
    return line;
  }
  void expect_section(const std::string& name) {
    const Line& line = next();
    if (line.tokens.size() != 1 || line.tokens.front() != "[" + name + "]") fail(line, "expected section [" + name + "]");
  }

 private:
  std::vector<Line> lines_;
  std::size_t pos_ = 0;
};

long long integer_field(const Line& line, std::size_t i) {
  try {
    return parse_integer(line.tokens.at(i));
  } catch (const std::exception&) {
    fail(line, "invalid integer");
  }
}

int node_ref(const DbnStructure& s, const Line& line, std::size_t i) {
  try {
    return s.index_of(line.tokens.at(i));
  } catch (const std::exception&) {
    fail(line, "unknown node '" + line.tokens.at(i) + "'");
  }
}

void read_header(Reader& in) {
  const Line& line = in.expect_key("schema_version", 1);
  if (integer_field(line, 1) != kDocumentSchemaVersion) {
    fail(line, "unsupported schema_version " + line.tokens[1]);
  }
}

DbnStructure read_structure(Reader& in) {
  DbnStructure s;
  in.expect_section("nodes");
  while (!in.at_section()) {
    const Line& line = in.next();
    if (line.tokens.size() != 3) fail(line, "node needs name, cardinality, layer");
    NodeSpec node;
    node.name = line.tokens[0];
    node.cardinality = static_cast<int>(integer_field(line, 1));
    try {
      node.layer = layer_from_string(line.tokens[2]);
    } catch (const std::exception& e) {
      fail(line, e.what());
    }
    s.nodes.push_back(std::move(node));
  }
  in.expect_section("intra_edges");
  while (!in.at_section()) {
    const Line& line = in.next();
    if (line.tokens.size() != 2) fail(line, "edge needs two node names");
    s.intra_edges.emplace(node_ref(s, line, 0), node_ref(s, line, 1));
  }
  in.expect_section("inter_edges");
  while (!in.done() && !in.at_section()) {
    const Line& line = in.next();
    if (line.tokens.size() != 1) fail(line, "inter edge needs one node name");
    s.inter_edges.insert(node_ref(s, line, 0));
  }
  try {
    s.validate();
  } catch (const std::exception& e) {
    throw ParseError(std::string("invalid structure: ") + e.what());
  }
  return s;
}

Cpt read_cpt(Reader& in, const DbnStructure& s, bool inter) {
  const Line& head = in.next();
  if (head.tokens.size() < 2 || head.tokens[0] != "cpt") fail(head, "expected 'cpt'");
  Cpt cpt;
  cpt.child = node_ref(s, head, 1);
  cpt.child_cardinality = s.nodes[static_cast<std::size_t>(cpt.child)].cardinality;
  if (inter) {
    if (head.tokens.size() != 2) fail(head, "inter cpt takes no parents");
    cpt.parents = {cpt.child};
  } else {
    if (head.tokens.size() < 3 || head.tokens[2] != "parents") fail(head, "expected 'parents'");
    for (std::size_t i = 3; i < head.tokens.size(); ++i) cpt.parents.push_back(node_ref(s, head, i));
    if (cpt.parents != s.parents(cpt.child)) fail(head, "cpt parents do not match the edge list");
  }
  for (int p : cpt.parents) cpt.parent_cardinalities.push_back(s.nodes[static_cast<std::size_t>(p)].cardinality);
  for (std::size_t r = 0; r < cpt.rows(); ++r) {
    const Line& line = in.next();
    if (line.tokens.size() != static_cast<std::size_t>(cpt.child_cardinality)) fail(line, "row width mismatch");
    double total = 0.0;
    for (const auto& tok : line.tokens) {
      double v = 0.0;
      try {
        v = parse_number(tok);
      } catch (const std::exception&) {
        fail(line, "invalid probability '" + tok + "'");
      }
      if (!(v >= 0.0 && v <= 1.0)) fail(line, "probability outside [0,1]");
      total += v;
      cpt.table.push_back(v);
    }
    if (std::abs(total - 1.0) > 1e-9) fail(line, "row sums to " + format_number(total, 12));
  }
  return cpt;
}

}  // namespace

std::string serialize_structure(const DbnStructure& structure) {
  std::ostringstream out;
  out << "schema_version " << kDocumentSchemaVersion << '\n';
  write_structure(out, structure);
  return out.str();
}

DbnStructure parse_structure(const std::string& text) {
  Reader in(text);
  read_header(in);
  return read_structure(in);
}

std::string serialize(const DbnModel& model) {
  std::ostringstream out;
  out << "schema_version " << kDocumentSchemaVersion << '\n';
  out << "sample_count " << model.sample_count << '\n';
  write_structure(out, model.structure);
  out << "[intra_cpts]\n";
  for (const auto& cpt : model.intra) write_cpt(out, model.structure, cpt, false);
  out << "[inter_cpts]\n";
  for (const auto& [node, cpt] : model.inter) write_cpt(out, model.structure, cpt, true);
  return out.str();
}

DbnModel deserialize(const std::string& text) {
  Reader in(text);
  read_header(in);
  DbnModel model;
  const Line& count = in.expect_key("sample_count", 1);
  const long long m = integer_field(count, 1);
  if (m < 0) fail(count, "negative sample_count");
  model.sample_count = static_cast<std::size_t>(m);
  model.structure = read_structure(in);
  in.expect_section("intra_cpts");
  for (std::size_t i = 0; i < model.structure.size(); ++i) {
    Cpt cpt = read_cpt(in, model.structure, false);
    if (cpt.child != static_cast<int>(i)) throw ParseError("intra cpts must follow node order");
    model.intra.push_back(std::move(cpt));
  }
  in.expect_section("inter_cpts");
  for (std::size_t i = 0; i < model.structure.inter_edges.size(); ++i) {
    Cpt cpt = read_cpt(in, model.structure, true);
    if (model.structure.inter_edges.count(cpt.child) == 0) throw ParseError("inter cpt for a node without inter edge");
    const int child = cpt.child;
    if (!model.inter.emplace(child, std::move(cpt)).second) throw ParseError("duplicate inter cpt");
  }
  if (!in.done()) fail(in.peek(), "trailing content");
  return model;
}

}  // namespace cpsor::dbn
