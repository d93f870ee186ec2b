#include "idl/report.hpp"

#include "idl/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace idl {

using nlohmann::json;

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos)
    return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"')
      out += '"';
    out += c;
  }
  return out + "\"";
}

} // namespace

json to_json(const GramSummary& s) {
  return json{{"mu", s.mutual_coherence},
              {"welch", s.welch_bound},
              {"hist_edges", s.offdiag_histogram.edges},
              {"hist_counts", s.offdiag_histogram.counts},
              {"sigma", s.singular_values},
              {"etf_flat", s.etf_flat_value},
              {"etf_size_admissible", s.etf_size_admissible}};
}

GramSummary gram_summary_from_json(const json& j) {
  GramSummary s;
  s.mutual_coherence = j.at("mu").get<double>();
  s.welch_bound = j.at("welch").get<double>();
  s.offdiag_histogram.edges = j.at("hist_edges").get<std::vector<double>>();
  s.offdiag_histogram.counts = j.at("hist_counts").get<std::vector<std::uint64_t>>();
  s.singular_values = j.at("sigma").get<std::vector<double>>();
  s.etf_flat_value = j.at("etf_flat").get<double>();
  s.etf_size_admissible = j.at("etf_size_admissible").get<bool>();
  return s;
}

json to_json(const DecorrelationReport& r) {
  return json{{"pair_updates", r.pair_updates},
              {"sweeps", r.sweeps},
              {"converged", r.converged},
              {"final_coherence", r.final_coherence}};
}

DecorrelationReport decorrelation_report_from_json(const json& j) {
  DecorrelationReport r;
  r.pair_updates = j.at("pair_updates").get<std::uint64_t>();
  r.sweeps = j.at("sweeps").get<std::uint64_t>();
  r.converged = j.at("converged").get<bool>();
  r.final_coherence = j.at("final_coherence").get<double>();
  return r;
}

json to_json(const IterationRecord& rec, std::size_t iteration, bool include_timing) {
  json j{{"iteration", iteration},
         {"approx_error", rec.approx_error},
         {"penalized_objective", rec.penalized_objective},
         {"mutual_coherence", rec.mutual_coherence},
         {"singular_values", rec.singular_values},
         {"update_objective_before", rec.update_objective_before},
         {"update_objective_after", rec.update_objective_after},
         {"reseeded_atoms", rec.reseeded_atoms},
         {"replaced_atoms", rec.replaced_atoms},
         {"decorrelation", rec.decorrelation ? to_json(*rec.decorrelation) : json(nullptr)}};
  if (include_timing)
    j["wall_time"] = rec.wall_time;
  return j;
}

std::string history_to_json_lines(const TrainHistory& history, bool include_timing) {
  std::string out;
  for (std::size_t i = 0; i < history.size(); ++i) {
    out += to_json(history[i], i, include_timing).dump();
    out += '\n';
  }
  return out;
}

std::string history_to_csv(const TrainHistory& history) {
  std::ostringstream out;
  out << "iteration,approx_error,penalized_objective,mutual_coherence,wall_time";
  const std::size_t nsigma = history.empty() ? 0 : history.front().singular_values.size();
  for (std::size_t k = 0; k < nsigma; ++k)
    out << ",sigma_" << k;
  out << '\n';
  for (std::size_t i = 0; i < history.size(); ++i) {
    const auto& r = history[i];
    out << i << ',' << fmt_double(r.approx_error) << ',' << fmt_double(r.penalized_objective) << ','
        << fmt_double(r.mutual_coherence) << ',' << fmt_double(r.wall_time);
    for (const double s : r.singular_values)
      out << ',' << fmt_double(s);
    out << '\n';
  }
  return out.str();
}

json to_json(const ExperimentReport& report) {
  json grid = json::array();
  for (const GridResult& g : report.grid) {
    json trace = json::array();
    for (const TraceRow& t : g.trace)
      trace.push_back(
          {{"approx_error", t.approx_error}, {"penalized_objective", t.penalized_objective}, {"mu", t.mutual_coherence}});
    json row{{"method", g.method},
             {"parameter", g.parameter},
             {"gram", to_json(g.gram)},
             {"trace", std::move(trace)},
             {"decorrelation", g.decorrelation ? to_json(*g.decorrelation) : json(nullptr)},
             {"total_pair_updates", g.total_pair_updates},
             {"decorrelation_always_converged", g.decorrelation_always_converged}};
    if (report.include_timing)
      row["wall_time"] = g.wall_time;
    grid.push_back(std::move(row));
  }

  json curves = json::array();
  for (const GeneralizationCurve& c : report.generalization)
    curves.push_back({{"method", c.method}, {"parameter", c.parameter}, {"median_residual", c.median_residual}});

  return json{{"config", report.config},
              {"metadata", report.metadata},
              {"dim", report.dim},
              {"size", report.size},
              {"etf_flat", report.etf_flat},
              {"include_timing", report.include_timing},
              {"grid", std::move(grid)},
              {"cardinalities", report.cardinalities},
              {"generalization", std::move(curves)}};
}

ExperimentReport experiment_report_from_json(const json& j) {
  ExperimentReport report;
  report.config = j.at("config").get<std::map<std::string, std::string>>();
  report.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
  report.dim = j.at("dim").get<Index>();
  report.size = j.at("size").get<Index>();
  report.etf_flat = j.at("etf_flat").get<double>();
  report.include_timing = j.at("include_timing").get<bool>();
  for (const json& row : j.at("grid")) {
    GridResult g;
    g.method = row.at("method").get<std::string>();
    g.parameter = row.at("parameter").get<double>();
    g.gram = gram_summary_from_json(row.at("gram"));
    for (const json& t : row.at("trace"))
      g.trace.push_back({t.at("approx_error").get<double>(), t.at("penalized_objective").get<double>(),
                         t.at("mu").get<double>()});
    if (!row.at("decorrelation").is_null())
      g.decorrelation = decorrelation_report_from_json(row.at("decorrelation"));
    g.total_pair_updates = row.at("total_pair_updates").get<std::uint64_t>();
    g.decorrelation_always_converged = row.at("decorrelation_always_converged").get<bool>();
    if (row.contains("wall_time"))
      g.wall_time = row.at("wall_time").get<double>();
    report.grid.push_back(std::move(g));
  }
  report.cardinalities = j.at("cardinalities").get<std::vector<Index>>();
  for (const json& c : j.at("generalization"))
    report.generalization.push_back({c.at("method").get<std::string>(), c.at("parameter").get<double>(),
                                     c.at("median_residual").get<std::vector<double>>()});
  return report;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out.flush())
    throw IoError("write failed for " + path.string());
}

void export_report(const ExperimentReport& report, const std::filesystem::path& path, ReportFormat format) {
  if (format == ReportFormat::Json) {
    write_text_file(path, to_json(report).dump(2) + "\n");
    return;
  }

  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec)
    throw IoError("cannot create report directory " + path.string() + ": " + ec.message());

  struct Table {
    std::string file;
    std::string description;
    std::ostringstream body;
    std::size_t rows = 0;
  };
  Table config{"config.csv", "configuration echo", {}, 0};
  Table gram{"gram.csv", "frame statistics per trained dictionary", {}, 0};
  Table spectra{"spectra.csv", "singular values per trained dictionary", {}, 0};
  Table hist{"histogram.csv", "off-diagonal Gram magnitude histogram", {}, 0};
  Table decor{"decorrelation.csv", "pair decorrelation totals", {}, 0};
  Table gen{"generalization.csv", "median normalized OMP residual per cardinality", {}, 0};

  config.body << "key,value\n";
  for (const auto& [k, v] : report.config) {
    config.body << csv_field(k) << ',' << csv_field(v) << '\n';
    ++config.rows;
  }
  gram.body << "method,parameter,mu,welch,etf_flat,etf_size_admissible,final_approx_error\n";
  spectra.body << "method,parameter,index,sigma,etf_flat\n";
  hist.body << "method,parameter,bin_low,bin_high,count\n";
  decor.body << "method,parameter,total_pair_updates,always_converged,final_sweeps,final_coherence\n";
  for (const GridResult& g : report.grid) {
    const std::string key = g.method + ',' + fmt_double(g.parameter);
    const double err = g.trace.empty() ? 0.0 : g.trace.back().approx_error;
    gram.body << key << ',' << fmt_double(g.gram.mutual_coherence) << ',' << fmt_double(g.gram.welch_bound) << ','
              << fmt_double(g.gram.etf_flat_value) << ',' << (g.gram.etf_size_admissible ? "true" : "false") << ','
              << fmt_double(err) << '\n';
    ++gram.rows;
    for (std::size_t i = 0; i < g.gram.singular_values.size(); ++i) {
      spectra.body << key << ',' << i << ',' << fmt_double(g.gram.singular_values[i]) << ','
                   << fmt_double(g.gram.etf_flat_value) << '\n';
      ++spectra.rows;
    }
    const auto& h = g.gram.offdiag_histogram;
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
      hist.body << key << ',' << fmt_double(h.edges[b]) << ',' << fmt_double(h.edges[b + 1]) << ',' << h.counts[b]
                << '\n';
      ++hist.rows;
    }
    if (g.decorrelation) {
      decor.body << key << ',' << g.total_pair_updates << ',' << (g.decorrelation_always_converged ? "true" : "false")
                 << ',' << g.decorrelation->sweeps << ',' << fmt_double(g.decorrelation->final_coherence) << '\n';
      ++decor.rows;
    }
  }
  gen.body << "method,parameter,cardinality,median_residual\n";
  for (const GeneralizationCurve& c : report.generalization) {
    for (std::size_t i = 0; i < c.median_residual.size() && i < report.cardinalities.size(); ++i) {
      gen.body << c.method << ',' << fmt_double(c.parameter) << ',' << report.cardinalities[i] << ','
               << fmt_double(c.median_residual[i]) << '\n';
      ++gen.rows;
    }
  }

  std::ostringstream manifest;
  manifest << "file,rows,description\n";
  for (Table* t : {&config, &gram, &spectra, &hist, &decor, &gen}) {
    write_text_file(path / t->file, t->body.str());
    manifest << t->file << ',' << t->rows << ',' << csv_field(t->description) << '\n';
  }
  write_text_file(path / "manifest.csv", manifest.str());
}

} // namespace idl
