// Python bindings for the banachforge core.  The surface mirrors the CLI:
// norms on sequence spaces, set-family queries, finite-stage extension
// models, and the falsification suites.  JSON-shaped values cross the
// boundary as Python dicts (converted through the stdlib json module).

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "banachforge/diagalg.hpp"
#include "banachforge/verify.hpp"

namespace py = pybind11;

namespace {

using namespace banachforge;

bool float_mode_of(const std::string& mode) {
  if (mode == "exact") return false;
  if (mode == "float") return true;
  throw ParseError("unknown scalar mode: " + mode + " (expected exact or float)");
}

// Vectors arrive either as a CSV string ("1,-2,1/3") or as a sequence whose
// items are ints, floats, or rational strings; position in the sequence is
// the coordinate index.
Coeffs coeffs_from_py(const py::object& v, bool float_mode) {
  if (py::isinstance<py::str>(v)) return coeffs_from_csv(v.cast<std::string>(), float_mode);
  Coeffs c;
  int i = 0;
  for (py::handle item : v.cast<py::sequence>()) {
    ++i;
    Scalar s;
    if (py::isinstance<py::str>(item)) {
      mpq_class q = parse_rat(item.cast<std::string>());
      s = float_mode ? Scalar::flt(q.get_d()) : Scalar::rat(q);
    } else if (py::isinstance<py::int_>(item)) {
      long x = item.cast<long>();
      s = float_mode ? Scalar::flt(static_cast<double>(x)) : Scalar::rat(mpq_class(x));
    } else {
      s = Scalar::flt(item.cast<double>());
    }
    c.set(i, s);
  }
  return c;
}

// Exact scalars surface as rational strings, floats as Python floats.
py::object scalar_to_py(const Scalar& s) {
  if (s.exact) return py::str(to_string(s));
  return py::float_(s.d);
}

json json_from_py(const py::object& obj) {
  std::string text = py::isinstance<py::str>(obj)
                         ? obj.cast<std::string>()
                         : py::module_::import("json").attr("dumps")(obj).cast<std::string>();
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

py::object json_to_py(const ordered_json& j) {
  return py::module_::import("json").attr("loads")(py::str(j.dump()));
}

FiniteSet set_from_py(const std::vector<int>& elems) {
  try {
    return FiniteSet(std::vector<int>(elems));
  } catch (const std::exception& e) {
    throw ParseError(e.what());
  }
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "norms on exotic sequence spaces, set families, finite-stage "
            "extension models, and falsification suites";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<CapError>(m, "CapError", PyExc_ValueError);

  m.def(
      "norm",
      [](const std::string& space, const py::object& vector, const std::string& mode) {
        NormOracle oracle = make_oracle(space);
        bool fm = float_mode_of(mode);
        return scalar_to_py(oracle(coeffs_from_py(vector, fm)));
      },
      py::arg("space"), py::arg("vector"), py::arg("mode") = "exact",
      "Evaluate a sequence-space norm; exact mode returns a rational string, "
      "float mode a float.");

  m.def(
      "family_member",
      [](const std::string& spec, const std::vector<int>& elems) {
        return member(parse_family(spec), set_from_py(elems));
      },
      py::arg("spec"), py::arg("elements"), "Does the set belong to the family?");

  m.def(
      "family_admissible",
      [](const std::string& spec, const std::vector<std::vector<int>>& sets) {
        FamilySpec fam = parse_family(spec);
        std::vector<FiniteSet> blocks;
        blocks.reserve(sets.size());
        for (const auto& s : sets) blocks.push_back(set_from_py(s));
        return is_admissible(fam, blocks);
      },
      py::arg("spec"), py::arg("sets"), "Is the block sequence admissible for the family?");

  m.def(
      "family_regular",
      [](const std::string& spec, int cap) { return is_regular(parse_family(spec), cap); },
      py::arg("spec"), py::arg("cap"),
      "Spreading + hereditary over every subset of {1..cap}.");

  m.def("suite_names", &suite_names, "Names of the falsification suites.");

  m.def(
      "verify",
      [](const std::string& suite, long trials, unsigned long long seed,
         const std::string& mode) {
        SuiteReport report = run_suite(suite, trials, seed, float_mode_of(mode));
        return json_to_py(report.to_json());
      },
      py::arg("suite"), py::arg("trials") = 0, py::arg("seed") = 1, py::arg("mode") = "exact",
      "Run a falsification suite; returns the report as a dict.");

  m.def(
      "bd_build",
      [](const py::object& request) {
        json req = request.is_none() ? json::object() : json_from_py(request);
        return json_to_py(run_build_request(req));
      },
      py::arg("request") = py::none(),
      "Build an extension model from a request dict; returns the model dict "
      "with the built node ids under 'built'.");

  m.def(
      "bd_eval",
      [](const py::object& model, int gamma, const py::object& vector,
         const std::string& mode) {
        bool fm = float_mode_of(mode);
        BDModel m2 = model_from_json(json_from_py(model));
        YVec u = yvec_from_json(json_from_py(vector), fm);
        ExtCtx ctx(m2, u);
        ordered_json out;
        out["gamma"] = gamma;
        out["e"] = to_string(ctx.e(gamma));
        out["c"] = to_string(ctx.c(gamma));
        out["d"] = to_string(ctx.d(gamma));
        return json_to_py(out);
      },
      py::arg("model"), py::arg("gamma"), py::arg("vector"), py::arg("mode") = "exact",
      "Evaluate the coordinate, chained, and difference functionals at a node.");

  m.def(
      "bd_analysis",
      [](const py::object& model, int gamma) {
        BDModel m2 = model_from_json(json_from_py(model));
        EvalAnalysis a = evaluation_analysis(m2, gamma);
        ordered_json out;
        out["gamma"] = gamma;
        out["windex"] = a.windex;
        ordered_json entries = ordered_json::array();
        for (const auto& e : a.entries) {
          ordered_json row;
          row["rank"] = e.rank;
          row["xi"] = e.node;
          if (e.b_is_node)
            row["b"] = ordered_json{{"pool", "node"}, {"eta", e.b}};
          else
            row["b"] = handle_to_json(m2.handle(e.b));
          entries.push_back(row);
        }
        out["entries"] = entries;
        return json_to_py(out);
      },
      py::arg("model"), py::arg("gamma"), "Evaluation analysis of a node.");

  m.def(
      "bd_norm",
      [](const py::object& model, const py::object& vector, const std::string& mode) {
        bool fm = float_mode_of(mode);
        BDModel m2 = model_from_json(json_from_py(model));
        YVec u = yvec_from_json(json_from_py(vector), fm);
        return scalar_to_py(norm_Y(m2, u));
      },
      py::arg("model"), py::arg("vector"), py::arg("mode") = "exact",
      "Stage norm of a vector against a model.");
}
