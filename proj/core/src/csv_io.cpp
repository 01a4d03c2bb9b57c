#include "safeplan/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include <fmt/format.h>

namespace safeplan {

namespace {

constexpr const char* kPathHeader = "x1,x2,theta,cost";
constexpr const char* kTreeHeader = "parent_id,child_id,x1_from,x2_from,x1_to,x2_to";
constexpr const char* kTrajectoryHeader = "t,x1,x2,theta,omega,min_h";

std::string fmt_num(double v)
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    return fmt::format("{:.10g}", v);
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string::npos)
            break;
        start = comma + 1;
    }
    return out;
}

double parse_num(const std::string& tok, std::size_t line_no)
{
    if (tok == "inf")
        return std::numeric_limits<double>::infinity();
    if (tok == "-inf")
        return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size() || std::isnan(v))
        throw CsvError(fmt::format("line {}: bad number '{}'", line_no, tok));
    return v;
}

int parse_id(const std::string& tok, std::size_t line_no)
{
    int v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw CsvError(fmt::format("line {}: bad id '{}'", line_no, tok));
    return v;
}

// Calls row(fields, line_no) for each data line after checking the header.
template <typename RowFn>
void read_rows(std::istream& in, const char* header, std::size_t columns, RowFn&& row)
{
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (!have_header) {
            if (line != header)
                throw CsvError(fmt::format("line {}: expected header '{}'", line_no, header));
            have_header = true;
            continue;
        }
        const auto f = split(line);
        if (f.size() != columns)
            throw CsvError(fmt::format("line {}: expected {} columns, got {}", line_no, columns,
                                       f.size()));
        row(f, line_no);
    }
    if (!have_header)
        throw CsvError(fmt::format("missing header '{}'", header));
}

}  // namespace

void write_path_csv(std::ostream& out, std::span<const Node> path)
{
    out << kPathHeader << '\n';
    for (const auto& n : path)
        out << fmt_num(n.state.x1) << ',' << fmt_num(n.state.x2) << ',' << fmt_num(n.state.theta)
            << ',' << fmt_num(n.cost) << '\n';
}

void write_tree_csv(std::ostream& out, const Tree& tree)
{
    out << kTreeHeader << '\n';
    for (const auto& n : tree.all_nodes()) {
        if (!n.parent)
            continue;
        const Node& p = tree.node(*n.parent);
        out << p.id << ',' << n.id << ',' << fmt_num(p.state.x1) << ',' << fmt_num(p.state.x2)
            << ',' << fmt_num(n.state.x1) << ',' << fmt_num(n.state.x2) << '\n';
    }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory)
{
    out << kTrajectoryHeader << '\n';
    for (const auto& s : trajectory.samples)
        out << fmt_num(s.t) << ',' << fmt_num(s.state.x1) << ',' << fmt_num(s.state.x2) << ','
            << fmt_num(s.state.theta) << ',' << fmt_num(s.omega) << ',' << fmt_num(s.min_h)
            << '\n';
}

std::vector<Waypoint> read_path_csv(std::istream& in)
{
    std::vector<Waypoint> out;
    read_rows(in, kPathHeader, 4, [&](const std::vector<std::string>& f, std::size_t ln) {
        out.push_back({{parse_num(f[0], ln), parse_num(f[1], ln), parse_num(f[2], ln)},
                       parse_num(f[3], ln)});
    });
    return out;
}

std::vector<TreeEdge> read_tree_csv(std::istream& in)
{
    std::vector<TreeEdge> out;
    read_rows(in, kTreeHeader, 6, [&](const std::vector<std::string>& f, std::size_t ln) {
        out.push_back({parse_id(f[0], ln),
                       parse_id(f[1], ln),
                       {parse_num(f[2], ln), parse_num(f[3], ln)},
                       {parse_num(f[4], ln), parse_num(f[5], ln)}});
    });
    return out;
}

Trajectory read_trajectory_csv(std::istream& in)
{
    Trajectory out;
    read_rows(in, kTrajectoryHeader, 6, [&](const std::vector<std::string>& f, std::size_t ln) {
        out.samples.push_back({parse_num(f[0], ln),
                               {parse_num(f[1], ln), parse_num(f[2], ln), parse_num(f[3], ln)},
                               parse_num(f[4], ln),
                               parse_num(f[5], ln)});
    });
    return out;
}

}  // namespace safeplan
