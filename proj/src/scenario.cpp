#include "gnslab/scenario.hpp"

#include <chrono>
#include <fstream>
#include <initializer_list>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gnslab/error.hpp"
#include "gnslab/gns.hpp"
#include "gnslab/markov.hpp"
#include "gnslab/matrix.hpp"
#include "gnslab/phys.hpp"
#include "gnslab/prob.hpp"
#include "gnslab/scalar.hpp"
#include "gnslab/star_algebra.hpp"
#include "gnslab/state.hpp"
#include "gnslab/symmetry.hpp"
#include "gnslab/tolerance.hpp"

namespace gnslab {
namespace {

using json = nlohmann::json;
using oj = nlohmann::ordered_json;

constexpr const char* kScenarioVersion = "gnslab-scenario/1";
constexpr const char* kReportVersion = "gnslab-report/1";

std::string error_message(const Error& e) {
  std::string w = e.what();
  std::string prefix = e.code() + ": ";
  return w.rfind(prefix, 0) == 0 ? w.substr(prefix.size()) : w;
}

// ---------------------------------------------------------------------------
// Scalar literals. Exact scenarios write scalars as canonical strings
// ("a/b+c/d i") or plain integers; float scenarios write numbers or
// [re, im] pairs. Anything else is a backend mismatch or a parse error.

template <class K>
K to_scalar(const json& j, const std::string& where) {
  if constexpr (is_exact_v<K>) {
    if (j.is_string()) {
      try {
        return parse_exact_scalar(j.get<std::string>());
      } catch (const Error& e) {
        fail(e.code(), where + ": " + error_message(e));
      }
    }
    if (j.is_number_integer())
      return ExactScalar(Rational(j.get<long long>()));
    if (j.is_number())
      fail("BackendMismatch", where + ": floating-point literal in an exact scenario");
    fail("ParseError", where + ": expected a scalar literal");
  } else {
    if (j.is_number()) return FloatScalar(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
      return FloatScalar(j[0].get<double>(), j[1].get<double>());
    if (j.is_string())
      fail("BackendMismatch", where + ": exact scalar literal in a float scenario");
    fail("ParseError", where + ": expected a number or an [re, im] pair");
  }
}

template <class K>
Vec<K> to_vec(const json& j, const std::string& where) {
  if (!j.is_array()) fail("ParseError", where + ": expected an array of scalars");
  Vec<K> out;
  out.reserve(j.size());
  for (size_t i = 0; i < j.size(); ++i)
    out.push_back(to_scalar<K>(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

template <class K>
Mat<K> to_mat(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    fail("ParseError", where + ": expected an array of rows");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  Mat<K> out(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      fail("ParseError", where + ": rows have inconsistent lengths");
    for (int c = 0; c < cols; ++c)
      out(r, c) = to_scalar<K>(row[c],
                               where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
  }
  return out;
}

double clean_zero(double x) { return x == 0.0 ? 0.0 : x; }

oj scalar_json(const ExactScalar& x) { return oj(format_scalar(x)); }

oj scalar_json(const FloatScalar& x) {
  if (x.imag() == 0.0) return oj(clean_zero(x.real()));
  return oj::array({clean_zero(x.real()), clean_zero(x.imag())});
}

template <class K>
oj vector_json(const Vec<K>& v) {
  oj out = oj::array();
  for (const K& x : v) out.push_back(scalar_json(x));
  return out;
}

template <class K>
oj matrix_json(const Mat<K>& m) {
  oj out = oj::array();
  for (int r = 0; r < m.rows; ++r) {
    oj row = oj::array();
    for (int c = 0; c < m.cols; ++c) row.push_back(scalar_json(m(r, c)));
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<std::string> to_labels(const json& j) {
  std::vector<std::string> out;
  for (const auto& x : j) out.push_back(x.get<std::string>());
  return out;
}

std::vector<std::vector<int>> to_table(const json& j) {
  std::vector<std::vector<int>> out;
  for (const auto& row : j) {
    std::vector<int> r;
    for (const auto& x : row) r.push_back(x.get<int>());
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Static checking. The checker walks the document once, records one
// diagnostic per problem, and builds a registry of declared names with
// statically known shapes (algebra dimensions, matrix sizes, ...).

enum class Kind {
  kMatrixAlgebra,
  kFunctionAlgebra,
  kGroupAlgebra,
  kTensorAlgebra,
  kElement,
  kState,
  kVectorialState,
  kHom,
  kLinearMap,
  kKernel,
  kProbSpace,
  kGroupTable,
  kAction,
};

bool algebra_kind(Kind k) {
  return k == Kind::kMatrixAlgebra || k == Kind::kFunctionAlgebra ||
         k == Kind::kGroupAlgebra || k == Kind::kTensorAlgebra;
}

bool state_kind(Kind k) { return k == Kind::kState || k == Kind::kVectorialState; }

struct DeclInfo {
  Kind kind;
  int dim = 0;   // algebra dimension
  int rep = 0;   // faithful representation dimension
  int rows = 0;  // kernel |dom| / table order / prob point count
  int cols = 0;  // kernel |cod|
};

const std::map<std::string, Kind>& kind_names() {
  static const std::map<std::string, Kind> k = {
      {"matrix_algebra", Kind::kMatrixAlgebra},
      {"function_algebra", Kind::kFunctionAlgebra},
      {"group_algebra", Kind::kGroupAlgebra},
      {"tensor_algebra", Kind::kTensorAlgebra},
      {"element", Kind::kElement},
      {"state", Kind::kState},
      {"vectorial_state", Kind::kVectorialState},
      {"hom", Kind::kHom},
      {"linear_map", Kind::kLinearMap},
      {"kernel", Kind::kKernel},
      {"prob_space", Kind::kProbSpace},
      {"group_table", Kind::kGroupTable},
      {"action", Kind::kAction},
  };
  return k;
}

struct Checker {
  const json& doc;
  std::string backend;
  std::vector<Diagnostic> out;
  std::map<std::string, DeclInfo> names;

  void add(const std::string& code, const std::string& where, const std::string& message) {
    out.push_back({code, where, message});
  }

  bool scalar_ok(const json& j, const std::string& where) {
    if (backend == "exact") {
      if (j.is_string()) {
        try {
          parse_exact_scalar(j.get<std::string>());
          return true;
        } catch (const Error& e) {
          add(e.code(), where, error_message(e));
          return false;
        }
      }
      if (j.is_number_integer()) return true;
      if (j.is_number()) {
        add("BackendMismatch", where, "floating-point literal in an exact scenario");
        return false;
      }
      add("ParseError", where, "expected a scalar literal");
      return false;
    }
    if (j.is_number()) return true;
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return true;
    if (j.is_string()) {
      add("BackendMismatch", where, "exact scalar literal in a float scenario");
      return false;
    }
    add("ParseError", where, "expected a number or an [re, im] pair");
    return false;
  }

  bool scalar_array_ok(const json& holder, const char* key, int want, const std::string& where) {
    if (!holder.contains(key)) {
      add("ParseError", where, std::string("missing \"") + key + "\"");
      return false;
    }
    const json& j = holder[key];
    std::string at = where + "." + key;
    if (!j.is_array()) {
      add("ParseError", at, "expected an array of scalars");
      return false;
    }
    if (want >= 0 && static_cast<int>(j.size()) != want) {
      add("ShapeMismatch", at,
          "expected " + std::to_string(want) + " entries, found " + std::to_string(j.size()));
      return false;
    }
    bool ok = true;
    for (size_t i = 0; i < j.size(); ++i)
      ok = scalar_ok(j[i], at + "[" + std::to_string(i) + "]") && ok;
    return ok;
  }

  bool scalar_matrix_ok(const json& holder, const char* key, int rows, int cols,
                        const std::string& where) {
    if (!holder.contains(key)) {
      add("ParseError", where, std::string("missing \"") + key + "\"");
      return false;
    }
    const json& j = holder[key];
    std::string at = where + "." + key;
    if (!j.is_array() || j.empty() || !j[0].is_array()) {
      add("ParseError", at, "expected a matrix as an array of rows");
      return false;
    }
    int jr = static_cast<int>(j.size());
    int jc = static_cast<int>(j[0].size());
    if (rows >= 0 && (jr != rows || jc != cols)) {
      add("ShapeMismatch", at,
          "expected a " + std::to_string(rows) + "x" + std::to_string(cols) +
              " matrix, found " + std::to_string(jr) + "x" + std::to_string(jc));
      return false;
    }
    bool ok = true;
    for (int r = 0; r < jr; ++r) {
      if (!j[r].is_array() || static_cast<int>(j[r].size()) != jc) {
        add("ParseError", at, "rows have inconsistent lengths");
        return false;
      }
      for (int c = 0; c < jc; ++c)
        ok = scalar_ok(j[r][c],
                       at + "[" + std::to_string(r) + "][" + std::to_string(c) + "]") &&
             ok;
    }
    return ok;
  }

  int table_ok(const json& holder, const char* key, const std::string& where) {
    if (!holder.contains(key)) {
      add("ParseError", where, std::string("missing \"") + key + "\"");
      return -1;
    }
    const json& t = holder[key];
    std::string at = where + "." + key;
    if (!t.is_array() || t.empty()) {
      add("ParseError", at, "expected a nonempty multiplication table");
      return -1;
    }
    int n = static_cast<int>(t.size());
    for (int r = 0; r < n; ++r) {
      if (!t[r].is_array() || static_cast<int>(t[r].size()) != n) {
        add("ShapeMismatch", at, "multiplication table is not square");
        return -1;
      }
      for (int c = 0; c < n; ++c) {
        if (!t[r][c].is_number_integer() || t[r][c].get<int>() < 0 || t[r][c].get<int>() >= n) {
          add("ParseError", at, "table entries must be indices into the element list");
          return -1;
        }
      }
    }
    return n;
  }

  bool labels_ok(const json& holder, const char* key, const std::string& where, int* count) {
    *count = 0;
    if (!holder.contains(key)) {
      add("ParseError", where, std::string("missing \"") + key + "\"");
      return false;
    }
    const json& j = holder[key];
    std::string at = where + "." + key;
    if (!j.is_array() || j.empty()) {
      add("ParseError", at, "expected a nonempty array of labels");
      return false;
    }
    std::set<std::string> seen;
    for (const auto& x : j) {
      if (!x.is_string()) {
        add("ParseError", at, "labels must be strings");
        return false;
      }
      if (!seen.insert(x.get<std::string>()).second) {
        add("DuplicateLabel", at, "label \"" + x.get<std::string>() + "\" repeats");
        return false;
      }
    }
    *count = static_cast<int>(j.size());
    return true;
  }

  const DeclInfo* ref(const json& holder, const char* key, const std::string& where,
                      std::initializer_list<Kind> kinds, const char* what) {
    if (!holder.contains(key)) {
      add("ParseError", where, std::string("missing \"") + key + "\"");
      return nullptr;
    }
    const json& r = holder[key];
    std::string at = where + "." + key;
    if (!r.is_string()) {
      add("ParseError", at, "expected the name of a declaration");
      return nullptr;
    }
    std::string name = r.get<std::string>();
    auto it = names.find(name);
    if (it == names.end()) {
      add("UnresolvedReference", at, "\"" + name + "\" is not declared");
      return nullptr;
    }
    for (Kind k : kinds)
      if (it->second.kind == k) return &it->second;
    add("ParseError", at, "\"" + name + "\" is not " + what);
    return nullptr;
  }

  const DeclInfo* state_ref(const json& holder, const char* key, const std::string& where) {
    return ref(holder, key, where, {Kind::kState, Kind::kVectorialState}, "a state");
  }

  const DeclInfo* algebra_ref(const json& holder, const char* key, const std::string& where) {
    return ref(holder, key, where,
               {Kind::kMatrixAlgebra, Kind::kFunctionAlgebra, Kind::kGroupAlgebra,
                Kind::kTensorAlgebra},
               "an algebra");
  }

  void check_declaration(const json& d, const std::string& where) {
    if (!d.is_object()) {
      add("ParseError", where, "declarations must be objects");
      return;
    }
    if (!d.contains("name") || !d["name"].is_string() || d["name"].get<std::string>().empty()) {
      add("ParseError", where, "missing a nonempty \"name\"");
      return;
    }
    std::string name = d["name"].get<std::string>();
    if (names.count(name)) {
      add("DuplicateLabel", where, "name \"" + name + "\" repeats");
      return;
    }
    if (!d.contains("kind") || !d["kind"].is_string() ||
        !kind_names().count(d["kind"].get<std::string>())) {
      add("ParseError", where, "unknown declaration kind");
      return;
    }
    Kind kind = kind_names().at(d["kind"].get<std::string>());
    DeclInfo info{kind, 0, 0, 0, 0};
    switch (kind) {
      case Kind::kMatrixAlgebra: {
        if (!d.contains("n") || !d["n"].is_number_integer() || d["n"].get<int>() < 1) {
          add("ParseError", where, "matrix_algebra needs an integer \"n\" >= 1");
          return;
        }
        int n = d["n"].get<int>();
        info.dim = n * n;
        info.rep = n;
        break;
      }
      case Kind::kFunctionAlgebra: {
        int n = 0;
        if (!labels_ok(d, "points", where, &n)) return;
        info.dim = info.rep = n;
        break;
      }
      case Kind::kGroupAlgebra: {
        int n = table_ok(d, "table", where);
        if (n < 0) return;
        info.dim = info.rep = n;
        break;
      }
      case Kind::kTensorAlgebra: {
        const DeclInfo* l = algebra_ref(d, "left", where);
        const DeclInfo* r = algebra_ref(d, "right", where);
        if (!l || !r) return;
        info.dim = l->dim * r->dim;
        info.rep = l->rep * r->rep;
        break;
      }
      case Kind::kElement: {
        const DeclInfo* a = algebra_ref(d, "algebra", where);
        if (!a) return;
        scalar_array_ok(d, "coords", a->dim, where);
        break;
      }
      case Kind::kState: {
        const DeclInfo* a = algebra_ref(d, "algebra", where);
        if (!a) return;
        scalar_array_ok(d, "functional", a->dim, where);
        break;
      }
      case Kind::kVectorialState: {
        const DeclInfo* a = algebra_ref(d, "algebra", where);
        if (!a) return;
        scalar_array_ok(d, "vector", a->rep, where);
        break;
      }
      case Kind::kHom:
      case Kind::kLinearMap: {
        const DeclInfo* dom = algebra_ref(d, "dom", where);
        const DeclInfo* cod = algebra_ref(d, "cod", where);
        if (!dom || !cod) return;
        scalar_matrix_ok(d, "matrix", cod->dim, dom->dim, where);
        break;
      }
      case Kind::kKernel: {
        int nd = 0, nc = 0;
        bool ok = labels_ok(d, "dom", where, &nd);
        ok = labels_ok(d, "cod", where, &nc) && ok;
        if (!ok) return;
        scalar_matrix_ok(d, "matrix", nd, nc, where);
        info.rows = nd;
        info.cols = nc;
        break;
      }
      case Kind::kProbSpace: {
        int n = 0;
        if (!labels_ok(d, "points", where, &n)) return;
        scalar_array_ok(d, "weights", n, where);
        info.rows = n;
        break;
      }
      case Kind::kGroupTable: {
        int n = table_ok(d, "table", where);
        if (n < 0) return;
        info.rows = n;
        break;
      }
      case Kind::kAction: {
        const DeclInfo* t = ref(d, "group", where, {Kind::kGroupTable}, "a group table");
        state_ref(d, "state", where);
        if (!d.contains("automorphisms") || !d["automorphisms"].is_array()) {
          add("ParseError", where, "action needs an array of automorphism references");
          return;
        }
        if (t && static_cast<int>(d["automorphisms"].size()) != t->rows)
          add("ShapeMismatch", where + ".automorphisms",
              "expected one automorphism per group element");
        for (size_t i = 0; i < d["automorphisms"].size(); ++i) {
          json holder;
          holder["at"] = d["automorphisms"][i];
          ref(holder, "at", where + ".automorphisms[" + std::to_string(i) + "]",
              {Kind::kHom}, "a hom");
        }
        break;
      }
    }
    names.emplace(name, info);
  }

  void check_command(const json& cmd, const std::string& where) {
    if (!cmd.is_object()) {
      add("ParseError", where, "commands must be objects");
      return;
    }
    if (cmd.contains("name") && !cmd["name"].is_string()) {
      add("ParseError", where, "command names must be strings");
      return;
    }
    if (!cmd.contains("op") || !cmd["op"].is_string()) {
      add("ParseError", where, "missing \"op\"");
      return;
    }
    std::string op = cmd["op"].get<std::string>();
    if (op == "gns" || op == "is_positive") {
      state_ref(cmd, "state", where);
    } else if (op == "born") {
      ref(cmd, "observable", where, {Kind::kElement}, "an element");
      state_ref(cmd, "state", where);
    } else if (op == "ee_link") {
      ref(cmd, "observable", where, {Kind::kElement}, "an element");
      state_ref(cmd, "state", where);
      if (!cmd.contains("lambda"))
        add("ParseError", where, "missing \"lambda\"");
      else
        scalar_ok(cmd["lambda"], where + ".lambda");
    } else if (op == "gns_map" || op == "gns_mc") {
      ref(cmd, "hom", where, {Kind::kHom}, "a hom");
      state_ref(cmd, "state", where);
    } else if (op == "collapse") {
      ref(cmd, "projection", where, {Kind::kElement}, "an element");
      state_ref(cmd, "state", where);
    } else if (op == "stinespring") {
      ref(cmd, "map", where, {Kind::kLinearMap}, "a linear map");
      state_ref(cmd, "state", where);
    } else if (op == "kernel_to_cp") {
      ref(cmd, "kernel", where, {Kind::kKernel}, "a kernel");
    } else if (op == "cp_to_kernel") {
      ref(cmd, "map", where, {Kind::kLinearMap}, "a linear map");
    } else if (op == "prism") {
      ref(cmd, "kernel", where, {Kind::kKernel}, "a kernel");
      ref(cmd, "measure", where, {Kind::kProbSpace}, "a probability space");
    } else if (op == "evolve") {
      state_ref(cmd, "start", where);
      if (!cmd.contains("maps") || !cmd["maps"].is_array()) {
        add("ParseError", where, "evolve needs an array of linear map references");
        return;
      }
      for (size_t i = 0; i < cmd["maps"].size(); ++i) {
        json holder;
        holder["at"] = cmd["maps"][i];
        ref(holder, "at", where + ".maps[" + std::to_string(i) + "]", {Kind::kLinearMap},
            "a linear map");
      }
    } else if (op == "equivariant") {
      ref(cmd, "action", where, {Kind::kAction}, "an action");
    } else {
      add("ParseError", where, "unknown op \"" + op + "\"");
    }
  }

  void check() {
    if (!doc.is_object()) {
      add("ParseError", "$", "top level must be an object");
      return;
    }
    if (!doc.contains("version") || !doc["version"].is_string() ||
        doc["version"].get<std::string>() != kScenarioVersion)
      add("ParseError", "version",
          std::string("expected version \"") + kScenarioVersion + "\"");
    if (!doc.contains("backend") || !doc["backend"].is_string() ||
        (doc["backend"].get<std::string>() != "exact" &&
         doc["backend"].get<std::string>() != "float"))
      add("ParseError", "backend", "backend must be \"exact\" or \"float\"");
    if (doc.contains("tolerances")) {
      const json& t = doc["tolerances"];
      if (!t.is_object()) {
        add("ParseError", "tolerances", "expected an object");
      } else {
        for (const auto& [k, v] : t.items()) {
          if (k != "rank_tol" && k != "psd_tol" && k != "spec_tol")
            add("ParseError", "tolerances." + k, "unknown tolerance");
          else if (!v.is_number() || v.get<double>() <= 0.0)
            add("ParseError", "tolerances." + k, "tolerances must be positive numbers");
        }
      }
    }
    if (!doc.contains("declarations") || !doc["declarations"].is_array()) {
      add("ParseError", "declarations", "expected an array of declarations");
    } else {
      int i = 0;
      for (const json& d : doc["declarations"])
        check_declaration(d, "declarations[" + std::to_string(i++) + "]");
    }
    if (!doc.contains("commands") || !doc["commands"].is_array()) {
      add("ParseError", "commands", "expected an array of commands");
    } else {
      int i = 0;
      for (const json& cmd : doc["commands"])
        check_command(cmd, "commands[" + std::to_string(i++) + "]");
    }
  }
};

// ---------------------------------------------------------------------------
// Lazy declaration evaluation. Objects are built when a command first uses
// them, so domain failures (a functional that is not *-linear, a table that
// is not a group, ...) surface as failures of the commands that need them.

template <class K>
class Evaluator {
 public:
  Evaluator(const json& decls, ToleranceConfig tol) : tol_(tol) {
    for (const json& d : decls) by_name_.emplace(d["name"].get<std::string>(), &d);
  }

  AlgebraPtr<K> algebra(const std::string& n) { return std::get<AlgebraPtr<K>>(eval(n)); }
  Element<K> element(const std::string& n) { return std::get<Element<K>>(eval(n)); }
  State<K> state(const std::string& n) { return std::get<State<K>>(eval(n)); }
  StarHomomorphism<K> hom(const std::string& n) {
    return std::get<StarHomomorphism<K>>(eval(n));
  }
  StarLinearMap<K> linear(const std::string& n) {
    return std::get<StarLinearMap<K>>(eval(n));
  }
  MarkovKernel<K> kernel(const std::string& n) { return std::get<MarkovKernel<K>>(eval(n)); }
  FiniteProbSpace<K> prob(const std::string& n) {
    return std::get<FiniteProbSpace<K>>(eval(n));
  }
  GroupAction<K> action(const std::string& n) { return std::get<GroupAction<K>>(eval(n)); }

 private:
  using Object = std::variant<AlgebraPtr<K>, Element<K>, State<K>, StarHomomorphism<K>,
                              StarLinearMap<K>, MarkovKernel<K>, FiniteProbSpace<K>,
                              std::vector<std::vector<int>>, GroupAction<K>>;

  const json& decl(const std::string& n) { return *by_name_.at(n); }

  Object& eval(const std::string& n) {
    auto hit = cache_.find(n);
    if (hit != cache_.end()) return hit->second;
    const json& d = decl(n);
    std::string kind = d["kind"].get<std::string>();
    std::string where = "declaration \"" + n + "\"";
    Object obj = build(d, kind, where);
    return cache_.emplace(n, std::move(obj)).first->second;
  }

  Object build(const json& d, const std::string& kind, const std::string& where) {
    if (kind == "matrix_algebra") return make_matrix_algebra<K>(d["n"].get<int>());
    if (kind == "function_algebra")
      return make_function_algebra<K>(to_labels(d["points"]));
    if (kind == "group_algebra") return make_group_algebra<K>(to_table(d["table"]));
    if (kind == "tensor_algebra")
      return tensor_algebra(algebra(d["left"].get<std::string>()),
                            algebra(d["right"].get<std::string>()));
    if (kind == "element")
      return make_element(algebra(d["algebra"].get<std::string>()),
                          to_vec<K>(d["coords"], where + ".coords"));
    if (kind == "state")
      return make_state(algebra(d["algebra"].get<std::string>()),
                        to_vec<K>(d["functional"], where + ".functional"), tol_);
    if (kind == "vectorial_state")
      return vectorial_state(algebra(d["algebra"].get<std::string>()),
                             to_vec<K>(d["vector"], where + ".vector"), tol_);
    if (kind == "hom")
      return check_homomorphism(algebra(d["dom"].get<std::string>()),
                                algebra(d["cod"].get<std::string>()),
                                to_mat<K>(d["matrix"], where + ".matrix"), tol_);
    if (kind == "linear_map")
      return check_star_linear(algebra(d["dom"].get<std::string>()),
                               algebra(d["cod"].get<std::string>()),
                               to_mat<K>(d["matrix"], where + ".matrix"), tol_);
    if (kind == "kernel")
      return markov_kernel(to_labels(d["dom"]), to_labels(d["cod"]),
                           to_mat<K>(d["matrix"], where + ".matrix"), tol_);
    if (kind == "prob_space")
      return prob_space(to_labels(d["points"]),
                        to_vec<K>(d["weights"], where + ".weights"), tol_);
    if (kind == "group_table") return to_table(d["table"]);
    if (kind == "action") {
      auto table =
          std::get<std::vector<std::vector<int>>>(eval(d["group"].get<std::string>()));
      State<K> st = state(d["state"].get<std::string>());
      std::vector<StarHomomorphism<K>> autos;
      for (const json& r : d["automorphisms"]) autos.push_back(hom(r.get<std::string>()));
      return group_action(table, st, autos, tol_);
    }
    fail("ParseError", where + ": unknown kind \"" + kind + "\"");
  }

  std::map<std::string, const json*> by_name_;
  std::map<std::string, Object> cache_;
  ToleranceConfig tol_;
};

// ---------------------------------------------------------------------------
// Command execution.

template <class K>
oj exec_command(const json& cmd, Evaluator<K>& ev, const ToleranceConfig& tol,
                bool normalize) {
  std::string op = cmd["op"].get<std::string>();
  auto sref = [&](const char* key) { return cmd[key].get<std::string>(); };
  oj payload;

  if (op == "gns") {
    GnsSpace<K> g = gns(ev.state(sref("state")), tol);
    payload["dim"] = g.dim();
    payload["gram"] = matrix_json(g.gram());
    payload["omega"] = vector_json(g.omega);
  } else if (op == "is_positive") {
    PsdResult<K> r = is_positive(ev.state(sref("state")), tol);
    payload["positive"] = r.psd;
    if (r.witness) payload["witness"] = vector_json(*r.witness);
  } else if (op == "born") {
    SpectralDistribution<K> d =
        born_distribution(ev.element(sref("observable")), ev.state(sref("state")), tol);
    if (normalize && d.total == 0.0)
      fail("DivisionByZero", "cannot normalize a distribution with total weight 0");
    oj entries = oj::array();
    for (const auto& e : d.entries) {
      oj row;
      row["eigenvalue"] = scalar_json(e.eigenvalue);
      row["weight"] = normalize ? e.weight / d.total : e.weight;
      entries.push_back(std::move(row));
    }
    payload["entries"] = std::move(entries);
    payload["total"] = normalize ? 1.0 : d.total;
  } else if (op == "ee_link") {
    K lambda = to_scalar<K>(cmd["lambda"], "lambda");
    EeLinkReport r =
        ee_link_check(ev.element(sref("observable")), ev.state(sref("state")), lambda, tol);
    payload["eigenvector"] = r.eigenvector;
    payload["almost_everywhere"] = r.almost_everywhere;
    payload["full_weight"] = r.full_weight;
    payload["agree"] = r.agree;
  } else if (op == "gns_map" || op == "gns_mc") {
    PhysMorphism<K> m = phys_morphism(ev.hom(sref("hom")), ev.state(sref("state")), tol);
    Mat<K> t = op == "gns_map" ? gns_map(m) : gns_c(m, tol);
    payload["rows"] = t.rows;
    payload["cols"] = t.cols;
    payload["matrix"] = matrix_json(t);
  } else if (op == "collapse") {
    Conditioning<K> c = conditioning(ev.element(sref("projection")), ev.state(sref("state")), tol);
    payload["probability"] = scalar_json(c.report.collapse_probability);
    payload["p_expectation"] = scalar_json(c.report.p_expectation);
    payload["dom_dim"] = c.morphism.dom_gns->dim();
    payload["cod_dim"] = c.morphism.cod_gns->dim();
    payload["isometric"] = c.report.j_isometric;
    payload["factorized"] = c.report.factorized;
    payload["omega_matches"] = c.report.omega_matches;
    payload["composite_checked"] = c.report.composite_checked;
    payload["composite_is_p"] = c.report.composite_is_p;
    payload["ok"] = c.report.ok;
  } else if (op == "stinespring") {
    StinespringDilation<K> d = stinespring(ev.linear(sref("map")), ev.state(sref("state")), tol);
    payload["h_dim"] = d.h_dim;
    payload["isometry"] = matrix_json(d.v);
  } else if (op == "kernel_to_cp") {
    CpMap<K> m = kernel_to_cp(ev.kernel(sref("kernel")), tol);
    payload["matrix"] = matrix_json(m.underlying.matrix);
    payload["unital"] = m.unital;
  } else if (op == "cp_to_kernel") {
    MarkovKernel<K> k = cp_to_kernel(ev.linear(sref("map")), tol);
    payload["dom"] = oj(k.dom);
    payload["cod"] = oj(k.cod);
    payload["matrix"] = matrix_json(k.matrix);
  } else if (op == "prism") {
    PrismReport<K> r = prism_compare(ev.kernel(sref("kernel")), ev.prob(sref("measure")), tol);
    payload["match"] = r.match;
    payload["gns_matrix"] = matrix_json(r.gns_matrix);
    payload["cl2_matrix"] = matrix_json(r.cl2_matrix);
  } else if (op == "evolve") {
    State<K> start = ev.state(sref("start"));
    State<K> cur = start;
    std::vector<MarkovMorphism<K>> chain;
    for (const json& r : cmd["maps"]) {
      MarkovMorphism<K> m = markov_morphism(ev.linear(r.get<std::string>()), cur, tol);
      cur = m.cod_state;
      chain.push_back(std::move(m));
    }
    MarkovMorphism<K> total = evolve(start, chain, tol);
    payload["steps"] = static_cast<int>(chain.size());
    payload["functional"] = vector_json(total.cod_state.functional);
    payload["normalization"] = scalar_json(total.cod_state.normalization);
  } else if (op == "equivariant") {
    UnitaryRep<K> r = equivariant_gns(ev.action(sref("action")), tol);
    payload["dim"] = r.dim;
    oj characters = oj::array();
    for (const Mat<K>& m : r.matrices) {
      K tr{};
      for (int i = 0; i < m.rows; ++i) tr += m(i, i);
      characters.push_back(scalar_json(tr));
    }
    payload["characters"] = std::move(characters);
  } else {
    fail("ParseError", "unknown op \"" + op + "\"");
  }
  return payload;
}

ToleranceConfig tolerances_of(const json& doc, const RunOptions& opts) {
  ToleranceConfig tol{};
  if (doc.is_object() && doc.contains("tolerances") && doc["tolerances"].is_object()) {
    const json& t = doc["tolerances"];
    if (t.contains("rank_tol")) tol.rank_tol = t["rank_tol"].get<double>();
    if (t.contains("psd_tol")) tol.psd_tol = t["psd_tol"].get<double>();
    if (t.contains("spec_tol")) tol.spec_tol = t["spec_tol"].get<double>();
  }
  if (opts.tol) {
    tol.rank_tol = *opts.tol;
    tol.psd_tol = *opts.tol;
    tol.spec_tol = *opts.tol;
  }
  return tol;
}

template <class K>
oj run_typed(const json& doc, const ToleranceConfig& tol, const RunOptions& opts,
             const std::string& backend) {
  Evaluator<K> ev(doc["declarations"], tol);
  oj report;
  report["version"] = kReportVersion;
  report["mode"] = "run";
  report["backend"] = backend;
  oj records = oj::array();
  int passed = 0, failed = 0, errors = 0, idx = 0;
  for (const json& cmd : doc["commands"]) {
    std::string op = cmd["op"].get<std::string>();
    std::string name = cmd.contains("name") ? cmd["name"].get<std::string>()
                                            : op + "#" + std::to_string(idx);
    oj rec;
    rec["name"] = name;
    rec["op"] = op;
    auto t0 = std::chrono::steady_clock::now();
    try {
      oj payload = exec_command<K>(cmd, ev, tol, opts.normalize);
      rec["status"] = "pass";
      rec["wall_ms"] = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
      rec["payload"] = std::move(payload);
      ++passed;
    } catch (const Error& e) {
      rec["status"] = "fail";
      rec["wall_ms"] = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
      rec["error"] = oj{{"code", e.code()}, {"message", error_message(e)}};
      ++failed;
    } catch (const std::exception& e) {
      rec["status"] = "error";
      rec["wall_ms"] = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
      rec["error"] = oj{{"code", "InternalError"}, {"message", e.what()}};
      ++errors;
    }
    records.push_back(std::move(rec));
    ++idx;
  }
  report["records"] = std::move(records);
  report["summary"] = oj{{"commands", idx},
                         {"passed", passed},
                         {"failed", failed},
                         {"errors", errors},
                         {"all_passed", failed == 0 && errors == 0}};
  return report;
}

std::pair<int, int> line_col(const std::string& text, size_t byte) {
  int line = 1, col = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

// ---------------------------------------------------------------------------

Scenario Scenario::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("ParseError", path + ": cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str(), path);
}

Scenario Scenario::from_text(const std::string& text, const std::string& origin) {
  Scenario s;
  s.origin_ = origin;
  try {
    s.doc_ = json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    fail("ParseError", origin + ":" + std::to_string(line) + ":" + std::to_string(col) +
                           ": invalid JSON");
  }
  return s;
}

std::string Scenario::backend() const {
  if (doc_.is_object() && doc_.contains("backend") && doc_["backend"].is_string())
    return doc_["backend"].get<std::string>();
  return "exact";
}

std::vector<Diagnostic> Scenario::validate(const RunOptions& opts) const {
  std::string effective = opts.backend ? *opts.backend : backend();
  if (effective != "exact" && effective != "float") effective = "exact";
  Checker c{doc_, effective, {}, {}};
  c.check();
  return c.out;
}

nlohmann::ordered_json Scenario::run(const RunOptions& opts) const {
  std::vector<Diagnostic> diags = validate(opts);
  if (!diags.empty()) {
    const Diagnostic& d = diags.front();
    fail(d.code, origin_ + ": " + d.where + ": " + d.message);
  }
  std::string effective = opts.backend ? *opts.backend : backend();
  ToleranceConfig tol = tolerances_of(doc_, opts);
  if (effective == "exact") return run_typed<ExactScalar>(doc_, tol, opts, effective);
  return run_typed<FloatScalar>(doc_, tol, opts, effective);
}

nlohmann::ordered_json validate_report(const std::vector<Diagnostic>& diags) {
  oj report;
  report["version"] = kReportVersion;
  report["mode"] = "validate";
  oj list = oj::array();
  for (const Diagnostic& d : diags)
    list.push_back(oj{{"code", d.code}, {"where", d.where}, {"message", d.message}});
  report["diagnostics"] = std::move(list);
  report["summary"] =
      oj{{"count", static_cast<int>(diags.size())}, {"valid", diags.empty()}};
  return report;
}

nlohmann::ordered_json suite_report(const std::vector<SuiteResult>& results,
                                    std::uint64_t seed) {
  oj report;
  report["version"] = kReportVersion;
  report["mode"] = "suite";
  report["seed"] = seed;
  oj records = oj::array();
  int passed = 0;
  for (const SuiteResult& r : results) {
    oj rec;
    rec["name"] = r.name;
    rec["status"] = r.pass ? "pass" : "fail";
    rec["wall_ms"] = r.wall_ms;
    oj payload;
    payload["checks"] = r.checks;
    if (!r.pass) payload["detail"] = r.detail;
    rec["payload"] = std::move(payload);
    records.push_back(std::move(rec));
    if (r.pass) ++passed;
  }
  report["records"] = std::move(records);
  report["summary"] = oj{{"suites", static_cast<int>(results.size())},
                         {"passed", passed},
                         {"failed", static_cast<int>(results.size()) - passed},
                         {"all_passed", passed == static_cast<int>(results.size())}};
  return report;
}

}  // namespace gnslab
