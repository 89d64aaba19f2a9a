#include "curveflow/curve_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace curveflow {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_curve_csv(const DiscreteCurve& curve, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw FileError("cannot open " + path.string() + " for writing");
    for (int d = 0; d < curve.dim(); ++d)
        out << (d ? "," : "") << "c" << d;
    out << "\n";
    for (int i = 0; i < curve.vertex_count(); ++i) {
        for (int d = 0; d < curve.dim(); ++d)
            out << (d ? "," : "") << format_double(curve.vertices(i, d));
        out << "\n";
    }
    if (!out)
        throw FileError("write failed for " + path.string());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ','))
        fields.push_back(field);
    return fields;
}

double parse_double(const std::string& s, const std::string& where) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size())
            throw ParseError("trailing characters in number '" + s + "' (" + where + ")");
        return v;
    } catch (const std::invalid_argument&) {
        throw ParseError("not a number: '" + s + "' (" + where + ")");
    } catch (const std::out_of_range&) {
        throw ParseError("number out of range: '" + s + "' (" + where + ")");
    }
}

} // namespace

DiscreteCurve read_curve_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw FileError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line))
        throw ParseError("empty curve file " + path.string());
    const int n = static_cast<int>(split_csv_line(line).size());
    if (n < 2)
        throw ParseError("curve file needs >= 2 columns: " + path.string());
    std::vector<Eigen::RowVectorXd> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        auto fields = split_csv_line(line);
        if (static_cast<int>(fields.size()) != n)
            throw ParseError(path.string() + ":" + std::to_string(lineno) +
                             ": expected " + std::to_string(n) + " fields");
        Eigen::RowVectorXd row(n);
        for (int d = 0; d < n; ++d)
            row(d) = parse_double(fields[d], path.string() + ":" + std::to_string(lineno));
        rows.push_back(std::move(row));
    }
    Eigen::MatrixXd verts(rows.size(), n);
    for (std::size_t i = 0; i < rows.size(); ++i)
        verts.row(i) = rows[i];
    return DiscreteCurve(std::move(verts));
}

void write_series_csv(const Series& series, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw FileError("cannot open " + path.string() + " for writing");
    out << "step,t,total,bending,coupling,length,v_l2,bc0,bc1,min_h\n";
    for (const SeriesRow& r : series.rows) {
        out << r.step << ',' << format_double(r.t) << ',' << format_double(r.total) << ','
            << format_double(r.bending) << ',' << format_double(r.coupling) << ','
            << format_double(r.length) << ',' << format_double(r.v_l2) << ','
            << format_double(r.bc0) << ',' << format_double(r.bc1) << ','
            << format_double(r.min_h) << "\n";
    }
    if (!out)
        throw FileError("write failed for " + path.string());
}

Series read_series_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw FileError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line))
        throw ParseError("empty series file " + path.string());
    Series s;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        auto f = split_csv_line(line);
        if (f.size() != 10)
            throw ParseError(path.string() + ":" + std::to_string(lineno) +
                             ": expected 10 fields");
        const std::string where = path.string() + ":" + std::to_string(lineno);
        SeriesRow r;
        r.step = static_cast<long>(parse_double(f[0], where));
        r.t = parse_double(f[1], where);
        r.total = parse_double(f[2], where);
        r.bending = parse_double(f[3], where);
        r.coupling = parse_double(f[4], where);
        r.length = parse_double(f[5], where);
        r.v_l2 = parse_double(f[6], where);
        r.bc0 = parse_double(f[7], where);
        r.bc1 = parse_double(f[8], where);
        r.min_h = parse_double(f[9], where);
        s.rows.push_back(r);
    }
    return s;
}

std::string energy_json(const EnergyBreakdown& e) {
    nlohmann::ordered_json j;
    j["bending"] = e.bending;
    j["coupling"] = e.coupling;
    j["length"] = e.length;
    j["total"] = e.total;
    return j.dump();
}

std::string audit_json(const AuditReport& r) {
    nlohmann::ordered_json j;
    j["id"] = r.inequality_id;
    j["corpus_size"] = r.corpus_size;
    j["empirical_constant"] = r.empirical_constant;
    j["worst_case"] = r.worst_case;
    j["pass"] = r.pass;
    auto details = nlohmann::ordered_json::array();
    for (const AuditDetail& d : r.details) {
        nlohmann::ordered_json item;
        item["curve"] = d.curve_id;
        item["ratio"] = d.ratio;
        details.push_back(item);
    }
    j["details"] = details;
    return j.dump(2);
}

void write_curves_svg(const std::vector<DiscreteCurve>& curves,
                      const std::filesystem::path& path) {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const DiscreteCurve& c : curves) {
        for (int i = 0; i < c.vertex_count(); ++i) {
            xmin = std::min(xmin, c.vertices(i, 0));
            xmax = std::max(xmax, c.vertices(i, 0));
            ymin = std::min(ymin, c.vertices(i, 1));
            ymax = std::max(ymax, c.vertices(i, 1));
        }
    }
    if (curves.empty()) {
        xmin = ymin = 0.0;
        xmax = ymax = 1.0;
    }
    const double pad = 0.05 * std::max({xmax - xmin, ymax - ymin, 1e-6});
    xmin -= pad; xmax += pad; ymin -= pad; ymax += pad;
    const double W = 640.0;
    const double H = W * (ymax - ymin) / (xmax - xmin);
    const char* palette[] = {"#888888", "#1f77b4", "#2ca02c", "#d62728",
                             "#9467bd", "#ff7f0e", "#17becf"};

    std::ofstream out(path);
    if (!out)
        throw FileError("cannot open " + path.string() + " for writing");
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
        << "' viewBox='0 0 " << W << " " << H << "'>\n";
    int idx = 0;
    for (const DiscreteCurve& c : curves) {
        out << "<polyline fill='none' stroke='" << palette[idx % 7]
            << "' stroke-width='1.5' points='";
        for (int i = 0; i < c.vertex_count(); ++i) {
            const double px = (c.vertices(i, 0) - xmin) / (xmax - xmin) * W;
            const double py = H - (c.vertices(i, 1) - ymin) / (ymax - ymin) * H;
            out << px << ',' << py << ' ';
        }
        out << "'/>\n";
        ++idx;
    }
    out << "</svg>\n";
}

} // namespace curveflow
