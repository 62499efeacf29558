#pragma once

#include <string>

#include "warplab/io.hpp"
#include "warplab/warp.hpp"

namespace warplab {

/// {"n_stages": L, "schedule": [...], "pieces": [{"kind", "params",
/// "domain"}]} with every number written so that parsing it back yields the
/// same warp bit for bit.
inline std::string warp_to_json(const WarpFunction& w) {
  std::string out = "{\n  \"n_stages\": " + std::to_string(w.n_stages()) +
                    ",\n  \"schedule\": [";
  for (std::size_t i = 0; i < w.schedule().size(); ++i) {
    if (i) out += ", ";
    out += w.schedule()[i].str();
  }
  out += "],\n  \"pieces\": [";
  for (std::size_t i = 0; i < w.pieces().size(); ++i) {
    const auto& p = w.pieces()[i];
    out += i ? ",\n    " : "\n    ";
    if (p.is_power()) {
      out += "{\"kind\": \"power\", \"params\": {\"gamma\": " +
             format_double(p.gamma()) + "}";
    } else {
      out += "{\"kind\": \"linear\", \"params\": {\"slope\": " +
             format_wide(p.slope()) +
             ", \"intercept\": " + format_wide(p.intercept()) + "}";
    }
    out += ", \"domain\": [" + format_wide(p.lo()) + ", " + format_wide(p.hi()) +
           "]}";
  }
  out += "\n  ]\n}\n";
  return out;
}

inline WarpFunction warp_from_json(const std::string& text) {
  const Json j = parse_json_literal(text);
  try {
    std::vector<BigInt> schedule;
    if (j.contains("schedule"))
      for (const auto& v : j.at("schedule"))
        schedule.push_back(parse_bigint(literal_text(v)));
    std::vector<WarpPiece> pieces;
    for (const auto& pj : j.at("pieces")) {
      const std::string kind = pj.at("kind").get<std::string>();
      const auto& dom = pj.at("domain");
      if (dom.size() != 2) throw ParseError("domain must have two entries");
      Wide lo = parse_wide(literal_text(dom[0]));
      Wide hi = parse_wide(literal_text(dom[1]));
      const auto& params = pj.at("params");
      if (kind == "power") {
        pieces.push_back(
            WarpPiece::power(literal_double(params.at("gamma")), lo, hi));
      } else if (kind == "linear") {
        pieces.push_back(WarpPiece::linear(
            parse_wide(literal_text(params.at("slope"))),
            parse_wide(literal_text(params.at("intercept"))), lo, hi));
      } else {
        throw ParseError("unknown piece kind '" + kind + "'");
      }
    }
    const int n_stages =
        j.contains("n_stages") ? static_cast<int>(literal_int(j.at("n_stages")))
                               : 0;
    return WarpFunction::from_pieces(std::move(pieces), std::move(schedule),
                                     n_stages);
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed warp JSON: ") + e.what());
  }
}

}  // namespace warplab
