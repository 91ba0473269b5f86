// spanwalk command-line front end.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "spanwalk/estimator.hpp"
#include "spanwalk/formula.hpp"
#include "spanwalk/gadget_graph.hpp"
#include "spanwalk/gate_catalog.hpp"
#include "spanwalk/szegedy_walk.hpp"
#include "spanwalk/verify.hpp"
#include "spanwalk/witness.hpp"

using namespace spanwalk;
using nlohmann::json;

namespace {

constexpr int kUsageError = 2;
constexpr int kVerifyFailure = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    bool json = false;
    std::string configPath;
};

EstimatorConfig loadCfg(const Globals& g) {
    return g.configPath.empty() ? loadDefaultConfig() : loadConfig(g.configPath);
}

void emit(const Globals& g, const json& j, const std::string& table) {
    if (g.json) std::cout << j.dump(2) << "\n";
    else std::cout << table;
}

std::string num(double v, int prec = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

Bits parseBits(const std::string& s, int n) {
    Bits x = bitsFromString(s);
    if (int(x.size()) != n)
        throw UsageError("input '" + s + "' has " + std::to_string(x.size()) + " bits, formula needs " +
                         std::to_string(n));
    return x;
}

// "MAJ", "EQUAL:3", "AND:2", "TT4:279" become formulas over x1..xk; anything
// with a parenthesis is parsed as a formula.
Formula gateOrFormula(const std::string& s) {
    if (s.find('(') != std::string::npos) return parseFormula(s);
    std::string name = s;
    int arity = -1;
    if (s.rfind("TT3:", 0) == 0) arity = 3;
    else if (s.rfind("TT4:", 0) == 0) arity = 4;
    else if (auto c = s.find(':'); c != std::string::npos) {
        name = s.substr(0, c);
        try {
            arity = std::stoi(s.substr(c + 1));
        } catch (const std::exception&) {
            throw UsageError("bad arity in '" + s + "'");
        }
    } else if (s == "MAJ") {
        arity = 3;
    } else {
        throw UsageError("gate '" + s + "' needs an arity, e.g. " + s + ":3");
    }
    std::string text = name + "(";
    for (int k = 1; k <= arity; ++k) text += (k > 1 ? ",x" : "x") + std::to_string(k);
    return parseFormula(text + ")");
}

// ---- eval ---------------------------------------------------------------------

int cmdEval(const Globals& g, const std::string& text, const std::string& xs, bool all, int shots,
            bool diagnostics) {
    const EstimatorConfig cfg = loadCfg(g);
    const Formula f = parseFormula(text);
    const PreparedFormula p = prepareFormula(f, cfg);
    std::vector<EvaluationResult> results;
    if (all) results = evaluateAll(p, cfg);
    else if (!xs.empty()) results.push_back(evaluatePrepared(p, parseBits(xs, f.numInputs), cfg));
    else throw UsageError("eval needs --x BITS or --all");

    json arr = json::array();
    std::ostringstream t;
    int wrong = 0;
    t << "formula " << p.text << "  ADV " << num(p.advPhi, 4) << "  t " << p.pe.ancillaBits() << "  queries "
      << querySchedule(p.pe) << "\n";
    t << "x            decision  classical  pAccept";
    if (shots > 0) t << "   sampled";
    t << "\n";
    for (const auto& r : results) {
        json j = toJson(r, diagnostics);
        t << r.x << std::string(r.x.size() < 13 ? 13 - r.x.size() : 1, ' ') << (r.decision ? "true " : "false")
          << "     " << (r.classical ? "true " : "false") << "      " << num(r.pAccept, 4);
        if (shots > 0) {
            const PhaseSpectrum s = startStateSpectrum(applyOracle(p.walk, bitsFromString(r.x)));
            const double est = sampledAcceptance(s, p.pe, shots, cfg.seed);
            j["sampled"] = est;
            j["shots"] = shots;
            t << "    " << num(est, 4);
        }
        if (!r.correct()) {
            ++wrong;
            t << "  MISMATCH";
        }
        t << "\n";
        arr.push_back(j);
    }
    if (all) t << (results.size() - wrong) << "/" << results.size() << " match the classical value\n";
    emit(g, all ? arr : arr[0], t.str());
    return wrong == 0 ? 0 : kVerifyFailure;
}

// ---- wsize --------------------------------------------------------------------

int cmdWsize(const Globals& g, const std::string& target) {
    const Formula f = gateOrFormula(target);
    const ProgramTree t = formulaTree(f);
    const std::vector<double> ones(std::size_t(f.numInputs), 1.0);
    const double tree = treeWitnessSize(t, ones);
    const SpanProgram flat = flatten(t, f.numInputs);
    const WitnessExtremes e = witnessExtremes(flat);
    json j = {{"formula", printFormula(f)}, {"wsize", tree}, {"flatWsize", e.max()},
              {"flatMaxTrue", e.maxTrue}, {"flatMaxFalse", e.maxFalse}};
    std::ostringstream o;
    o << printFormula(f) << "\nwsize " << num(tree, 10) << "\n";
    try {
        const double adv = formulaAdv(f);
        j["adv"] = adv;
        o << "ADV   " << num(adv, 10) << "\n";
    } catch (const std::exception&) {
        j["adv"] = nullptr;
        const double cw = nodeAdv(f.root);
        j["costWeightedAdv"] = cw;
        o << "ADV   " << num(cw, 10) << " (cost-weighted; formula is not adversary-balanced)\n";
    }
    o << "flat program: max true " << num(e.maxTrue, 6) << ", max false " << num(e.maxFalse, 6) << "\n";
    json preds = json::array();
    for (const auto& pr : composedComplexityBound(f)) {
        preds.push_back({{"node", pr.node}, {"predicted", pr.predicted}, {"adv", pr.adv}});
        if (f.root.kind != GateKind::Leaf && f.root.arity() > 0 && pr.node != printFormula(f))
            o << "  " << pr.node << ": " << num(pr.predicted, 6) << " (ADV " << num(pr.adv, 6) << ")\n";
    }
    j["subformulas"] = preds;
    emit(g, j, o.str());
    return 0;
}

// ---- spectrum -----------------------------------------------------------------

int cmdSpectrum(const Globals& g, const std::string& text, const std::string& xs, bool walk) {
    const EstimatorConfig cfg = loadCfg(g);
    const Formula f = parseFormula(text);
    const PreparedFormula p = prepareFormula(f, cfg);
    std::vector<Bits> inputs;
    if (!xs.empty()) inputs.push_back(parseBits(xs, f.numInputs));
    else
        for (std::uint64_t v = 0; v < (std::uint64_t(1) << f.numInputs); ++v)
            inputs.push_back(bitsFromIndex(v, f.numInputs));
    json arr = json::array();
    std::ostringstream o;
    o << p.text << "  |A'| " << num(p.delta.normAPrime, 6) << "  window eps/ADV " << num(cfg.eps / p.advPhi, 6)
      << "\nx            f  kernel  |aO|^2    |bO|^2    gap\n";
    for (const Bits& x : inputs) {
        const SpectrumReport s = spectrumReport(applyInput(p.graph, x), cfg.kernelTol);
        json j = {{"x", bitsToString(x)},
                  {"value", evaluateClassically(f, x)},
                  {"kernelDimension", s.kernelDimension},
                  {"supportA", s.supportA},
                  {"supportB", s.supportB},
                  {"gapWitness", s.gapWitness ? json(*s.gapWitness) : json(nullptr)}};
        if (xs.size()) {
            j["eigenvalues"] = std::vector<double>(s.eigenvalues.data(), s.eigenvalues.data() + s.eigenvalues.size());
        }
        if (walk) {
            const PhaseSpectrum ps = startStateSpectrum(applyOracle(p.walk, x));
            json ph = json::array();
            for (Eigen::Index k = 0; k < ps.theta.size(); ++k)
                if (ps.weight(k) > 1e-9) ph.push_back({{"theta", ps.theta(k)}, {"weight", ps.weight(k)}});
            j["walkPhases"] = ph;
        }
        const std::string xsv = bitsToString(x);
        o << xsv << std::string(xsv.size() < 13 ? 13 - xsv.size() : 1, ' ') << evaluateClassically(f, x) << "  "
          << s.kernelDimension << "       " << num(s.supportA, 6) << "  " << num(s.supportB, 6) << "  "
          << (s.gapWitness ? num(*s.gapWitness, 6) : std::string("-")) << "\n";
        arr.push_back(j);
    }
    emit(g, inputs.size() == 1 ? arr[0] : arr, o.str());
    return 0;
}

// ---- verify -------------------------------------------------------------------

int cmdVerify(const Globals& g, const std::string& scope, const std::string& formula) {
    const EstimatorConfig cfg = loadCfg(g);
    std::vector<CheckResult> results;
    if (!formula.empty()) {
        if (scope != "walk") throw UsageError("--formula applies to 'verify walk' only");
        results.push_back(checkFormulaWalk(parseFormula(formula), cfg));
    } else {
        std::vector<int> ids;
        try {
            ids = criteriaForScope(scope);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        for (int id : ids) {
            results.push_back(runCriterion(id, cfg));
            if (!g.json) std::cout << resultLine(results.back()) << std::endl;
        }
    }
    bool ok = true;
    json arr = json::array();
    for (const auto& r : results) {
        ok = ok && r.pass;
        arr.push_back(toJson(r));
    }
    if (g.json) std::cout << arr.dump(2) << "\n";
    else if (!formula.empty()) std::cout << resultLine(results[0]) << "\n";
    return ok ? 0 : kVerifyFailure;
}

// ---- table --------------------------------------------------------------------

int cmdTable(const Globals& g, const std::string& which) {
    std::vector<CatalogRow> rows;
    if (which == "threebit") {
        for (const auto& e : threeBitGates()) rows.push_back(verifyEntry(e, 1.0));
    } else if (which == "fourbit") {
        for (const auto& e : fourBitEntries())
            for (double b : e.parameterized ? std::vector<double>{0.5, 1.0, 2.0} : std::vector<double>{1.0})
                rows.push_back(verifyEntry(e, b, 1e-6, 1e-6));
    } else {
        throw UsageError("unknown table '" + which + "' (threebit, fourbit)");
    }
    json arr = json::array();
    std::ostringstream o;
    char line[256];
    std::snprintf(line, sizeof line, "%-6s %-34s %5s %8s %10s %10s %10s %10s  %s\n", "id", "function", "beta",
                  "table", "ADV", "wsize", "cert", "printed", "match");
    o << line;
    bool ok = true;
    for (const auto& r : rows) {
        ok = ok && r.pass();
        json j = {{"id", r.id},       {"name", r.name},       {"beta", r.beta},
                  {"programTable", r.programTable}, {"canonicalId", r.canonicalId}, {"adv", r.adv},
                  {"wsize", r.wsize}, {"flatWsize", r.flatWsize}, {"pass", r.pass()}, {"note", r.note}};
        if (r.certRatio) j["certRatio"] = *r.certRatio;
        if (r.printedWsize) j["printedWsize"] = *r.printedWsize;
        if (r.printedBalancedWsize) j["printedBalancedWsize"] = *r.printedBalancedWsize;
        arr.push_back(j);
        std::snprintf(line, sizeof line, "%-6u %-34.34s %5.2f %8u %10.6f %10.6f %10s %10s  %s\n", r.id,
                      r.name.c_str(), r.beta, r.programTable, r.adv, r.wsize,
                      r.certRatio ? num(*r.certRatio).c_str() : "-",
                      r.printedBalancedWsize ? num(*r.printedBalancedWsize).c_str() : "-",
                      r.pass() ? "yes" : "NO");
        o << line;
    }
    emit(g, arr, o.str());
    return ok ? 0 : kVerifyFailure;
}

// ---- export-graph ---------------------------------------------------------------

int cmdExportGraph(const Globals& g, const std::string& text, const std::string& xs, std::string format,
                   bool raw, const std::string& out) {
    const EstimatorConfig cfg = loadCfg(g);
    const Formula f = parseFormula(text);
    GadgetGraph gr = buildGadgetGraph(formulaProgram(f));
    if (!raw) gr = reweightOutput(gr, nodeAdv(f.root), cfg.epsW);
    if (!xs.empty()) gr = applyInput(gr, parseBits(xs, f.numInputs));
    if (format.empty()) format = g.json ? "json" : "dot";
    std::string body;
    if (format == "json") body = toJson(gr).dump(2) + "\n";
    else if (format == "dot") body = toDot(gr);
    else throw UsageError("graph format must be json or dot");
    if (out.empty()) {
        std::cout << body;
    } else {
        std::ofstream os(out);
        if (!os) throw std::runtime_error("cannot write " + out);
        os << body;
    }
    return 0;
}

// ---- calibrate / export-catalog ---------------------------------------------------

int cmdCalibrate(const Globals& g, const std::string& write, bool quick) {
    EstimatorConfig base = loadCfg(g);
    base.calibration = nullptr;
    CalibrationOptions opt;
    std::vector<std::string> suite = defaultCalibrationSuite();
    if (quick) {
        suite = {"MAJ(x1,x2,x3)", "MAJ(MAJ(x1,x2,x3),MAJ(x4,x5,x6),MAJ(x7,x8,x9))"};
        opt.epsWSweep = {0.2};
    }
    const CalibrationResult r = calibrate(suite, base, opt);
    std::ostringstream o;
    o << "epsW " << r.config.epsW << "  eps " << num(r.config.eps, 6) << "  padding " << r.config.padding
      << "  threshold " << num(r.config.threshold, 4) << "\n";
    for (const auto& c : r.cases)
        o << "  " << c.formula << ": completeness " << num(c.completeness, 4) << ", soundness "
          << num(c.soundness, 4) << ", queries " << c.queries << "\n";
    if (!write.empty()) {
        saveConfig(r.config, write);
        o << "written to " << write << "\n";
    }
    emit(g, toJson(r.config), o.str());
    return 0;
}

int cmdExportCatalog(const Globals& g, const std::string& out) {
    const json j = catalogJson();
    if (out.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream os(out);
        if (!os) throw std::runtime_error("cannot write " + out);
        os << j.dump(2) << "\n";
        if (!g.json) std::cout << "wrote " << j.size() << " entries to " << out << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Span programs, gadget graphs and walk-based formula evaluation"};
    app.require_subcommand(1);
    Globals g;
    app.add_flag("--json", g.json, "Machine-readable output");
    app.add_option("--config", g.configPath, "Config file (default: $SPANWALK_CONFIG or config/spanwalk.json)");

    std::string formula, xs, target, scope, which, format, out, write;
    bool all = false, diagnostics = false, walk = false, raw = false, quick = false;
    int shots = 0;
    int code = 0;

    auto* eval = app.add_subcommand("eval", "Evaluate a formula with the simulated walk algorithm");
    eval->add_option("formula", formula, "Formula, e.g. MAJ(x1,x2,x3)")->required();
    eval->add_option("--x", xs, "Input bits, x1 first");
    eval->add_flag("--all", all, "Every input");
    eval->add_option("--sample", shots, "Also estimate pAccept from this many seeded shots");
    eval->add_flag("--diagnostics", diagnostics, "Eigencomponent weights in JSON output");
    eval->callback([&] { code = cmdEval(g, formula, xs, all, shots, diagnostics); });

    auto* ws = app.add_subcommand("wsize", "Witness size of a gate or formula");
    ws->add_option("target", target, "MAJ, EQUAL:3, TT4:279, or a formula")->required();
    ws->callback([&] { code = cmdWsize(g, target); });

    auto* sp = app.add_subcommand("spectrum", "Kernel support and gap of the formula graph");
    sp->add_option("formula", formula)->required();
    sp->add_option("--x", xs, "One input (default: all)");
    sp->add_flag("--walk", walk, "Include walk eigenphases seen from the start state");
    sp->callback([&] { code = cmdSpectrum(g, formula, xs, walk); });

    auto* ve = app.add_subcommand("verify", "Run verification suites (nonzero exit on failure)");
    ve->add_option("scope", scope, "catalog, spectra, walk, witness, ratios, composition, all")->required();
    ve->add_option("--formula", formula, "Walk correspondence for one formula");
    ve->callback([&] { code = cmdVerify(g, scope, formula); });

    auto* ta = app.add_subcommand("table", "Catalog tables with computed values");
    ta->add_option("which", which, "threebit or fourbit")->required();
    ta->callback([&] { code = cmdTable(g, which); });

    auto* eg = app.add_subcommand("export-graph", "Write the gadget graph of a formula");
    eg->add_option("formula", formula)->required();
    eg->add_option("--x", xs, "Delete the input edges that are true under these bits");
    eg->add_option("--format", format, "json or dot");
    eg->add_flag("--raw", raw, "Unit output weight instead of the reweighted edge");
    eg->add_option("-o,--output", out, "Output file");
    eg->callback([&] { code = cmdExportGraph(g, formula, xs, format, raw, out); });

    auto* ca = app.add_subcommand("calibrate", "Sweep epsW, eps and padding; choose defaults");
    ca->add_option("--write", write, "Save the chosen config here");
    ca->add_flag("--quick", quick, "MAJ trees only, epsW = 0.2");
    ca->callback([&] { code = cmdCalibrate(g, write, quick); });

    auto* ec = app.add_subcommand("export-catalog", "Catalog programs and certificates as JSON");
    ec->add_option("-o,--output", out, "Output file");
    ec->callback([&] { code = cmdExportCatalog(g, out); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageError;
    } catch (const FormulaError& e) {
        std::cerr << "formula error: " << e.what() << "\n";
        return kUsageError;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return code;
}
