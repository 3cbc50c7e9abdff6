#include "somstream/eval.hpp"

#include <fstream>
#include <sstream>

namespace somstream {

namespace {

WindowReport confusion_window(const std::vector<LabelSet>& predictions,
                              const std::vector<LabelSet>& truths, std::size_t begin,
                              std::size_t end, int n_classes, UndefinedF undefined) {
    WindowReport w;
    w.n_instances = end - begin;
    w.tp.assign(n_classes, 0);
    w.fp.assign(n_classes, 0);
    w.fn.assign(n_classes, 0);
    for (std::size_t i = begin; i < end; ++i) {
        for (int c = 0; c < n_classes; ++c) {
            bool p = predictions[i].contains(c);
            bool t = truths[i].contains(c);
            if (p && t) ++w.tp[c];
            else if (p) ++w.fp[c];
            else if (t) ++w.fn[c];
        }
    }
    w.per_label_f.assign(n_classes, 0.0);
    double sum = 0.0;
    int counted = 0;
    for (int c = 0; c < n_classes; ++c) {
        std::uint64_t denom = 2 * w.tp[c] + w.fp[c] + w.fn[c];
        if (denom == 0) {
            if (undefined == UndefinedF::Exclude) continue;
            w.per_label_f[c] = 0.0;
        } else {
            w.per_label_f[c] = 2.0 * static_cast<double>(w.tp[c]) / static_cast<double>(denom);
        }
        sum += w.per_label_f[c];
        ++counted;
    }
    w.macro_f = counted > 0 ? sum / counted : 0.0;
    return w;
}

}  // namespace

double macro_f(const std::vector<LabelSet>& predictions,
               const std::vector<LabelSet>& truths, int n_classes, UndefinedF undefined) {
    if (predictions.size() != truths.size())
        throw std::invalid_argument("macro_f: length mismatch");
    return confusion_window(predictions, truths, 0, predictions.size(), n_classes,
                            undefined)
        .macro_f;
}

RunReport windowed_evaluate(const std::vector<LabelSet>& predictions,
                            const std::vector<LabelSet>& truths, int n_classes,
                            int n_windows, UndefinedF undefined) {
    if (predictions.size() != truths.size())
        throw std::invalid_argument("windowed_evaluate: length mismatch");
    if (predictions.size() < static_cast<std::size_t>(n_windows))
        throw std::invalid_argument(
            "windowed_evaluate: fewer instances than windows; use a smaller W");

    RunReport report;
    report.n_windows = n_windows;
    report.n_classes = n_classes;
    const std::size_t len = predictions.size();
    const std::size_t base = len / n_windows;
    const std::size_t extra = len % n_windows;  // first `extra` windows get one more

    std::size_t begin = 0;
    double sum = 0.0;
    for (int w = 0; w < n_windows; ++w) {
        std::size_t size = base + (static_cast<std::size_t>(w) < extra ? 1 : 0);
        WindowReport win =
            confusion_window(predictions, truths, begin, begin + size, n_classes, undefined);
        win.window_index = w;
        sum += win.macro_f;
        report.windows.push_back(std::move(win));
        begin += size;
    }
    report.mean_macro_f = sum / n_windows;
    return report;
}

std::vector<std::pair<std::uint64_t, LabelSet>> run_frozen_baseline(
    const Model& model, const std::vector<Instance>& stream, double eta) {
    OnlineState state(model, eta, /*adapt=*/false);
    process_stream(state, stream);
    return std::move(state.predictions_log);
}

void emit_report(const RunReport& report, const std::filesystem::path& base) {
    std::filesystem::path table = base;
    table += "_windows.csv";
    std::filesystem::path summary = base;
    summary += "_summary.txt";

    std::ofstream out(table);
    if (!out) throw std::runtime_error("emit_report: cannot write " + table.string());
    out << "window_index,n_instances,macro_f";
    for (int c = 0; c < report.n_classes; ++c) out << ",f_" << c;
    for (int c = 0; c < report.n_classes; ++c)
        out << ",tp_" << c << ",fp_" << c << ",fn_" << c;
    out << "\n";
    for (const auto& w : report.windows) {
        out << w.window_index << "," << w.n_instances << "," << format_double(w.macro_f);
        for (int c = 0; c < report.n_classes; ++c)
            out << "," << format_double(w.per_label_f[c]);
        for (int c = 0; c < report.n_classes; ++c)
            out << "," << w.tp[c] << "," << w.fp[c] << "," << w.fn[c];
        out << "\n";
    }
    if (!out) throw std::runtime_error("emit_report: write failed " + table.string());

    std::ofstream sum(summary);
    if (!sum) throw std::runtime_error("emit_report: cannot write " + summary.string());
    sum << "somstream-report 1\n";
    sum << "dataset " << (report.dataset_id.empty() ? "-" : report.dataset_id) << "\n";
    sum << "variant " << (report.variant.empty() ? "-" : report.variant) << "\n";
    sum << "grid_dim " << report.grid_dim << "\n";
    sum << "eta " << format_double(report.eta) << "\n";
    sum << "seed " << report.seed << "\n";
    sum << "n_windows " << report.n_windows << "\n";
    sum << "n_classes " << report.n_classes << "\n";
    sum << "mean_macro_f " << format_double(report.mean_macro_f) << "\n";
    if (!sum) throw std::runtime_error("emit_report: write failed " + summary.string());
}

RunReport parse_report(const std::filesystem::path& base) {
    std::filesystem::path table = base;
    table += "_windows.csv";
    std::filesystem::path summary = base;
    summary += "_summary.txt";

    RunReport report;
    {
        std::ifstream in(summary);
        if (!in) throw std::runtime_error("parse_report: cannot open " + summary.string());
        std::string magic;
        int version = 0;
        in >> magic >> version;
        if (magic != "somstream-report" || version != 1)
            throw std::runtime_error("parse_report: bad summary header in " +
                                     summary.string());
        std::string key;
        while (in >> key) {
            if (key == "dataset") in >> report.dataset_id;
            else if (key == "variant") in >> report.variant;
            else if (key == "grid_dim") in >> report.grid_dim;
            else if (key == "eta") in >> report.eta;
            else if (key == "seed") in >> report.seed;
            else if (key == "n_windows") in >> report.n_windows;
            else if (key == "n_classes") in >> report.n_classes;
            else if (key == "mean_macro_f") in >> report.mean_macro_f;
            else throw std::runtime_error("parse_report: unknown key '" + key + "'");
        }
        if (report.dataset_id == "-") report.dataset_id.clear();
        if (report.variant == "-") report.variant.clear();
    }

    std::ifstream in(table);
    if (!in) throw std::runtime_error("parse_report: cannot open " + table.string());
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        WindowReport w;
        const int n = report.n_classes;
        if (static_cast<int>(cells.size()) != 3 + 4 * n)
            throw std::runtime_error("parse_report: ragged row in " + table.string());
        w.window_index = std::stoi(cells[0]);
        w.n_instances = std::stoull(cells[1]);
        w.macro_f = std::stod(cells[2]);
        w.per_label_f.resize(n);
        w.tp.resize(n);
        w.fp.resize(n);
        w.fn.resize(n);
        for (int c = 0; c < n; ++c) w.per_label_f[c] = std::stod(cells[3 + c]);
        for (int c = 0; c < n; ++c) {
            w.tp[c] = std::stoull(cells[3 + n + 3 * c]);
            w.fp[c] = std::stoull(cells[3 + n + 3 * c + 1]);
            w.fn[c] = std::stoull(cells[3 + n + 3 * c + 2]);
        }
        report.windows.push_back(std::move(w));
    }
    return report;
}

}  // namespace somstream
