#include "asyncmed/report.hpp"

#include <sstream>

namespace asyncmed {

std::string rational_text(const Rational& r) { return r.get_str(); }

namespace {

Json set_json(const std::set<int>& s) { return Json(std::vector<int>(s.begin(), s.end())); }

Json types_json(const PartialTypes& x) {
  Json j = Json::object();
  for (const auto& [p, t] : x) j[std::to_string(p)] = t;
  return j;
}

}  // namespace

Json to_json(const Caps& c) {
  return Json{{"mode", c.mode},           {"samples", c.samples},       {"coalitions", c.coalitions},
              {"deviations", c.deviations}, {"schedulers", c.schedulers}, {"type_profiles", c.type_profiles},
              {"cells", c.cells},          {"note", c.note}};
}

Json to_json(const Witness& w) {
  return Json{{"K", set_json(w.K)},
              {"T", set_json(w.T)},
              {"deviation", w.deviation},
              {"scheduler", w.scheduler},
              {"scheduler_rhs", w.scheduler_rhs},
              {"types", types_json(w.types)},
              {"types_rhs", types_json(w.types_rhs)},
              {"player", w.player},
              {"lhs", rational_text(w.lhs)},
              {"rhs", rational_text(w.rhs)},
              {"gap", rational_text(w.gap)}};
}

Json to_json(const Verdict& v) {
  Json j{{"holds", v.holds}, {"caps", to_json(v.caps)}};
  j["witness"] = v.witness ? to_json(*v.witness) : Json(nullptr);
  return j;
}

Json to_json(const PunishmentResult& r) {
  Json j = to_json(r.verdict);
  j["min_lhs"] = rational_text(r.min_lhs);
  j["max_rhs"] = rational_text(r.max_rhs);
  return j;
}

Json to_json(const RelationVerdict& v) {
  Json matches = Json::array();
  for (const auto& [a, b] : v.matches) matches.push_back({a, b});
  return Json{{"holds", v.holds},   {"mode", v.mode},       {"fell_back", v.fell_back}, {"worst", rational_text(v.worst)},
              {"witness", v.witness}, {"matches", matches}, {"compared", v.compared}};
}

Json to_json(const CoterminationVerdict& v) {
  return Json{{"holds", v.holds},       {"runs", v.runs},       {"violations", v.violations},
              {"rate", v.rate},         {"cp_upper_95", v.cp_upper}, {"witness", v.witness},
              {"witness_seed", v.witness_seed}, {"cells", v.cells}};
}

Json to_json(const OutcomeDistribution& d) {
  Json p = Json::object();
  for (const auto& [a, q] : d.p) p[profile_name(a)] = rational_text(q);
  return Json{{"exact", d.exact}, {"samples", d.samples}, {"p", p}};
}

Json to_json(const CheapTalkProfile& ct) {
  const auto& P = ct.params;
  Json h = Json::object();
  for (const auto& [from, to] : ct.H) h[from] = to.name;
  return Json{{"n", P.n},
              {"k", P.k},
              {"t", P.t},
              {"degree", P.d},
              {"faults", P.f},
              {"errors", P.e},
              {"prime", P.p},
              {"regime", to_string(P.regime)},
              {"approach", to_string(P.approach)},
              {"epsilon", P.epsilon ? Json(rational_text(*P.epsilon)) : Json(nullptr)},
              {"fragile_output", P.fragile_output},
              {"circuit", Json{{"gates", ct.circuit->size()},
                               {"multiplications", ct.circuit->multiplications()},
                               {"coin_bits", ct.circuit->coin_bits},
                               {"digest", ct.circuit->digest()}}},
              {"budget", Json{{"n", ct.budget.n}, {"N", ct.budget.N}, {"c", ct.budget.c}, {"C", ct.budget.C},
                              {"limit", ct.budget.limit()}}},
              {"H", h},
              {"digest", ct.digest}};
}

std::string render(const Json& j) { return j.dump(2) + "\n"; }

std::string summary(const Json& j) {
  std::ostringstream out;
  if (!j.is_object()) return j.dump() + "\n";
  for (const auto& [key, value] : j.items()) {
    std::string text = value.is_object() && value.contains("holds") ? (value["holds"].get<bool>() ? "holds" : "FAILS")
                                                                     : value.dump();
    if (text.size() > 100) text = text.substr(0, 97) + "...";
    out << key << ": " << text << "\n";
  }
  return out.str();
}

}  // namespace asyncmed
