#include <cstdio>
#include <sstream>

#include "shipdrill/scoring.hpp"

namespace shipdrill {

namespace {

std::string fixed1(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", value);
  return buf;
}

std::string pad(std::string_view text, std::size_t width) {
  std::string out(text);
  if (out.size() < width) out.append(width - out.size(), ' ');
  return out;
}

std::string rpad(std::string_view text, std::size_t width) {
  std::string out;
  if (text.size() < width) out.append(width - text.size(), ' ');
  out += text;
  return out;
}

}  // namespace

std::optional<ReportFormat> parse_report_format(std::string_view text) {
  if (text == "json") return ReportFormat::json;
  if (text == "table") return ReportFormat::table;
  if (text == "csv") return ReportFormat::csv;
  return std::nullopt;
}

std::string emit_report(const ScoreReport& report, ReportFormat format) {
  std::ostringstream out;
  switch (format) {
    case ReportFormat::json:
      out << score_to_json(report).dump(2) << "\n";
      break;

    case ReportFormat::csv:
      out << "scenario_id,phase,time_s\n";
      for (int i = 0; i < kPhaseCount; ++i) {
        const std::string name(to_string(static_cast<DrillPhase>(i)));
        const auto it = report.per_phase_time_s.find(name);
        out << report.scenario_id << "," << name << "," << fixed1(it == report.per_phase_time_s.end() ? 0.0 : it->second)
            << "\n";
      }
      out << report.scenario_id << ",total," << fixed1(report.total_time_s) << "\n";
      break;

    case ReportFormat::table:
      out << "scenario  " << report.scenario_id << (report.completed ? "  (complete)" : "  (incomplete)") << "\n";
      for (int i = 0; i < kPhaseCount; ++i) {
        const std::string name(to_string(static_cast<DrillPhase>(i)));
        const auto it = report.per_phase_time_s.find(name);
        out << "  " << pad(name, 20) << rpad(fixed1(it == report.per_phase_time_s.end() ? 0.0 : it->second), 8)
            << " s\n";
      }
      out << "  " << pad("total", 20) << rpad(fixed1(report.total_time_s), 8) << " s\n";
      if (report.errors.empty()) {
        out << "errors    none\n";
      } else {
        out << "errors\n";
        for (const auto& e : report.errors) {
          out << "  " << pad(to_string(e.kind), 38) << " at " << fixed1(ticks_to_seconds(e.tick)) << " s\n";
        }
      }
      break;
  }
  return out.str();
}

std::string emit_report(const CohortReport& report, ReportFormat format) {
  std::ostringstream out;
  switch (format) {
    case ReportFormat::json: {
      nlohmann::ordered_json doc;
      doc["reference_tester"] = report.reference_tester;
      doc["levels"] = report.levels;
      auto& testers = doc["testers"] = nlohmann::ordered_json::array();
      for (const auto& p : report.testers) {
        testers.push_back({{"tester_id", p.tester_id},
                           {"exp_fire_drills", to_string(p.exp_fire_drills)},
                           {"exp_vr", to_string(p.exp_vr)},
                           {"exp_games", to_string(p.exp_games)},
                           {"group", to_string(gamer_group(p))}});
      }
      auto& times = doc["times"] = nlohmann::ordered_json::array();
      for (const auto& [key, time] : report.per_tester_level_times) {
        times.push_back({{"tester", key.tester},
                         {"level", key.level},
                         {"time_s", time},
                         {"delta_s", report.deltas_vs_reference.at(key)}});
      }
      auto& groups = doc["groups"] = nlohmann::ordered_json::array();
      for (const auto& [key, s] : report.group_summaries) {
        groups.push_back({{"group", to_string(key.group)},
                          {"level", key.level},
                          {"max_delta_s", s.max_delta_s},
                          {"mean_delta_s", s.mean_delta_s},
                          {"count", s.count}});
      }
      out << doc.dump(2) << "\n";
      break;
    }

    case ReportFormat::csv:
      out << "tester,level,time_s,delta_s\n";
      for (const auto& [key, time] : report.per_tester_level_times) {
        out << key.tester << "," << key.level << "," << fixed1(time) << ","
            << fixed1(report.deltas_vs_reference.at(key)) << "\n";
      }
      break;

    case ReportFormat::table: {
      out << "reference tester " << report.reference_tester << "\n\n";
      out << pad("tester", 10);
      for (const auto& level : report.levels) out << rpad(level, 16);
      out << "\n";
      for (const auto& p : report.testers) {
        out << pad(p.tester_id, 10);
        for (const auto& level : report.levels) {
          const auto it = report.per_tester_level_times.find({p.tester_id, level});
          if (it == report.per_tester_level_times.end()) {
            out << rpad("-", 16);
          } else {
            const double delta = report.deltas_vs_reference.at(it->first);
            out << rpad(fixed1(it->second) + " (" + (delta >= 0 ? "+" : "") + fixed1(delta) + ")", 16);
          }
        }
        out << "\n";
      }
      out << "\n" << pad("group", 24) << pad("level", 8) << rpad("max delta", 11) << rpad("mean delta", 12)
          << rpad("n", 4) << "\n";
      for (const auto& [key, s] : report.group_summaries) {
        out << pad(to_string(key.group), 24) << pad(key.level, 8) << rpad(fixed1(s.max_delta_s), 11)
            << rpad(fixed1(s.mean_delta_s), 12) << rpad(std::to_string(s.count), 4) << "\n";
      }
      break;
    }
  }
  return out.str();
}

}  // namespace shipdrill
