#include "ushape/io.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "numeric.hpp"
#include "ushape/error.hpp"

namespace ushape {

namespace {

std::vector<std::string_view> split(std::string_view s) {
  std::vector<std::string_view> cells;
  while (true) {
    const auto comma = s.find(',');
    cells.push_back(detail::trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return cells;
}

std::vector<std::string> expected_columns(Model model) {
  switch (model) {
    case Model::density: return {"x"};
    case Model::regression: return {"x", "y"};
    case Model::hazard: return {"time", "delta"};
    case Model::nhpp: return {"time"};
  }
  return {};
}

std::string joined(const std::vector<std::string>& cols) {
  std::string s;
  for (const auto& c : cols) s += (s.empty() ? "" : ",") + c;
  return s;
}

}  // namespace

Observations ingest(std::istream& in, Model model, const Interval& domain) {
  const auto cols = expected_columns(model);
  if ((model == Model::hazard || model == Model::nhpp) && domain.a() != 0.0)
    throw UsageError("hazard and nhpp data live on [0, T]; the interval must start at 0");

  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> line_of;
  std::string line;
  std::size_t row = 0;
  bool header = false;
  std::vector<std::size_t> pos(cols.size());
  while (std::getline(in, line)) {
    ++row;
    const auto s = detail::trim(line);
    if (s.empty() || s.front() == '#') continue;
    const auto cells = split(s);
    if (!header) {
      for (std::size_t k = 0; k < cols.size(); ++k) {
        const auto it = std::find(cells.begin(), cells.end(), cols[k]);
        if (it == cells.end())
          throw ParseError("missing column '" + cols[k] + "' (expected header '" + joined(cols) +
                               "')",
                           row);
        pos[k] = static_cast<std::size_t>(it - cells.begin());
      }
      if (cells.size() != cols.size())
        throw ParseError("expected header '" + joined(cols) + "'", row);
      header = true;
      continue;
    }
    if (cells.size() != cols.size())
      throw ParseError("expected " + std::to_string(cols.size()) + " column(s), found " +
                           std::to_string(cells.size()),
                       row);
    std::vector<double> v;
    for (std::size_t k = 0; k < cols.size(); ++k) v.push_back(detail::parse_number(cells[pos[k]], row));
    rows.push_back(std::move(v));
    line_of.push_back(row);
  }
  if (!header) throw ParseError("missing header row '" + joined(cols) + "'");

  switch (model) {
    case Model::density: {
      std::vector<double> x;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!domain.contains(rows[i][0]))
          throw ParseError("x = " + detail::format_number(rows[i][0]) + " outside the interval",
                           line_of[i]);
        x.push_back(rows[i][0]);
      }
      return Sample(std::move(x), domain);
    }
    case Model::regression: {
      std::vector<std::pair<double, double>> p;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!domain.contains(rows[i][0]))
          throw ParseError("x = " + detail::format_number(rows[i][0]) + " outside the interval",
                           line_of[i]);
        p.emplace_back(rows[i][0], rows[i][1]);
      }
      return RegressionData(std::move(p), domain);
    }
    case Model::hazard: {
      std::vector<CensoredRecord> r;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const double t = rows[i][0], d = rows[i][1];
        if (d != 0.0 && d != 1.0)
          throw ParseError("delta must be 0 or 1, got " + detail::format_number(d), line_of[i]);
        if (t < 0) throw ParseError("negative time", line_of[i]);
        r.push_back({t, static_cast<int>(d)});
      }
      return CensoredSample(std::move(r), domain.b());
    }
    case Model::nhpp: {
      std::vector<double> t;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const double x = rows[i][0];
        if (!(x > 0)) throw ParseError("event times must be positive", line_of[i]);
        if (x > domain.b())
          throw ParseError("time " + detail::format_number(x) + " beyond the horizon " +
                               detail::format_number(domain.b()),
                           line_of[i]);
        if (!t.empty() && !(x > t.back()))
          throw ParseError("event times must be strictly increasing", line_of[i]);
        t.push_back(x);
      }
      return EventLog(std::move(t), domain.b());
    }
  }
  throw UsageError("unknown model");
}

Observations ingest_file(const std::filesystem::path& path, Model model, const Interval& domain) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return ingest(in, model, domain);
}

void write_observations(std::ostream& out, const Observations& data) {
  const auto num = [](double x) { return detail::format_number(x); };
  std::visit(
      [&](const auto& obs) {
        using T = std::decay_t<decltype(obs)>;
        if constexpr (std::is_same_v<T, Sample>) {
          out << "x\n";
          for (double x : obs.values()) out << num(x) << '\n';
        } else if constexpr (std::is_same_v<T, RegressionData>) {
          out << "x,y\n";
          for (const auto& [x, y] : obs.pairs()) out << num(x) << ',' << num(y) << '\n';
        } else if constexpr (std::is_same_v<T, CensoredSample>) {
          out << "time,delta\n";
          for (const auto& r : obs.records()) out << num(r.x) << ',' << r.delta << '\n';
        } else {
          out << "time\n";
          for (double t : obs.times()) out << num(t) << '\n';
        }
      },
      data);
}

void write_estimate_csv(std::ostream& out, const ShapeEstimate& estimate) {
  write_csv(out, estimate.f);
  out << "# mode=" << detail::format_number(estimate.mode) << " shape=" << to_string(estimate.shape)
      << " d=" << detail::format_number(estimate.d) << '\n';
}

}  // namespace ushape
