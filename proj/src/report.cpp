#include "relay/report.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace relay {

namespace {

using nlohmann::json;

std::string fmt12(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void check_shape(const std::vector<ReportRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("report has no rows");
  const auto& first = rows.front().mechanisms;
  for (const auto& row : rows) {
    if (row.mechanisms.size() != first.size())
      throw std::invalid_argument("report rows list different mechanisms");
    for (std::size_t m = 0; m < first.size(); ++m) {
      if (row.mechanisms[m].name != first[m].name ||
          row.mechanisms[m].per_user.size() != first[m].per_user.size())
        throw std::invalid_argument("report rows list different mechanisms");
    }
  }
}

json to_json(const MechanismResult& m) {
  return json{{"name", m.name},         {"total", m.total},
              {"per_user", m.per_user}, {"utilization", m.utilization},
              {"price", m.price},       {"variance", m.variance},
              {"feasible", m.feasible}, {"ne_check", m.ne_check}};
}

MechanismResult mechanism_from_json(const json& j) {
  MechanismResult m;
  j.at("name").get_to(m.name);
  j.at("total").get_to(m.total);
  j.at("per_user").get_to(m.per_user);
  j.at("utilization").get_to(m.utilization);
  j.at("price").get_to(m.price);
  j.at("variance").get_to(m.variance);
  j.at("feasible").get_to(m.feasible);
  j.at("ne_check").get_to(m.ne_check);
  return m;
}

}  // namespace

ReportFormat parse_report_format(std::string_view text) {
  if (text == "csv") return ReportFormat::Csv;
  if (text == "json") return ReportFormat::Json;
  throw std::invalid_argument("unknown report format: " + std::string(text));
}

void write_csv(std::ostream& out, const std::vector<ReportRow>& rows,
               const ReportMeta& meta) {
  check_shape(rows);
  out << (meta.coordinate_name.empty() ? "coordinate" : meta.coordinate_name);
  for (const auto& m : rows.front().mechanisms) {
    for (const char* col :
         {"total", "utilization", "price", "variance", "feasible", "ne_check"})
      out << ',' << m.name << '_' << col;
    for (std::size_t u = 0; u < m.per_user.size(); ++u)
      out << ',' << m.name << "_user" << (u + 1);
  }
  out << '\n';
  for (const auto& row : rows) {
    out << fmt12(row.coordinate);
    for (const auto& m : row.mechanisms) {
      out << ',' << fmt12(m.total) << ',' << fmt12(m.utilization) << ','
          << fmt12(m.price) << ',' << fmt12(m.variance) << ','
          << (m.feasible ? 1 : 0) << ',' << (m.ne_check ? 1 : 0);
      for (double v : m.per_user) out << ',' << fmt12(v);
    }
    out << '\n';
  }
}

void write_json(std::ostream& out, const std::vector<ReportRow>& rows,
                const ReportMeta& meta) {
  check_shape(rows);
  json doc;
  doc["meta"] = {{"experiment", meta.experiment},
                 {"coordinate", meta.coordinate_name},
                 {"seed", meta.seed},
                 {"rng", meta.rng},
                 {"units", "bits/s/Hz"}};
  json arr = json::array();
  for (const auto& row : rows) {
    json mechs = json::array();
    for (const auto& m : row.mechanisms) mechs.push_back(to_json(m));
    arr.push_back({{"coordinate", row.coordinate}, {"mechanisms", mechs}});
  }
  doc["rows"] = std::move(arr);
  out << doc.dump(2) << '\n';
}

std::vector<ReportRow> read_json_rows(std::istream& in) {
  const json doc = json::parse(in);
  std::vector<ReportRow> rows;
  for (const auto& r : doc.at("rows")) {
    ReportRow row;
    r.at("coordinate").get_to(row.coordinate);
    for (const auto& m : r.at("mechanisms"))
      row.mechanisms.push_back(mechanism_from_json(m));
    rows.push_back(std::move(row));
  }
  return rows;
}

ReportMeta read_json_meta(std::istream& in) {
  const json doc = json::parse(in);
  const auto& m = doc.at("meta");
  ReportMeta meta;
  m.at("experiment").get_to(meta.experiment);
  m.at("coordinate").get_to(meta.coordinate_name);
  m.at("seed").get_to(meta.seed);
  m.at("rng").get_to(meta.rng);
  return meta;
}

std::filesystem::path emit_report(const std::vector<ReportRow>& rows,
                                  ReportFormat format,
                                  const std::filesystem::path& dir,
                                  const ReportMeta& meta) {
  std::filesystem::create_directories(dir);
  const auto path =
      dir / (meta.experiment + (format == ReportFormat::Csv ? ".csv" : ".json"));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  if (format == ReportFormat::Csv)
    write_csv(out, rows, meta);
  else
    write_json(out, rows, meta);
  out.flush();
  if (!out) throw std::runtime_error("error writing " + path.string());
  return path;
}

}  // namespace relay
