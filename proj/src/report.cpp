#include "sclame/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace sclame {

ordered_json json_complex(cplx v)
{
    ordered_json j;
    j["re"] = v.real();
    j["im"] = v.imag();
    return j;
}

namespace {

void dump_value(const ordered_json& v, std::string& out, int indent, int depth)
{
    const std::string pad(static_cast<std::size_t>(indent) * depth, ' ');
    const std::string pad1(static_cast<std::size_t>(indent) * (depth + 1), ' ');
    switch (v.type()) {
        case nlohmann::json::value_t::object: {
            if (v.empty()) { out += "{}"; return; }
            out += "{\n";
            std::size_t i = 0;
            for (auto it = v.begin(); it != v.end(); ++it, ++i) {
                out += pad1 + '"' + it.key() + "\": ";
                dump_value(it.value(), out, indent, depth + 1);
                if (i + 1 < v.size()) out += ',';
                out += '\n';
            }
            out += pad + "}";
            return;
        }
        case nlohmann::json::value_t::array: {
            if (v.empty()) { out += "[]"; return; }
            out += "[\n";
            for (std::size_t i = 0; i < v.size(); ++i) {
                out += pad1;
                dump_value(v[i], out, indent, depth + 1);
                if (i + 1 < v.size()) out += ',';
                out += '\n';
            }
            out += pad + "]";
            return;
        }
        case nlohmann::json::value_t::number_float: {
            const double d = v.get<double>();
            if (std::isnan(d)) { out += "null"; return; }
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", d);
            out += buf;
            // bare integers would re-parse as such; keep them floats
            if (!std::strpbrk(buf, ".eE")) out += ".0";
            return;
        }
        default:
            out += v.dump();
            return;
    }
}

} // namespace

std::string dump_report(const ordered_json& doc, int indent)
{
    std::string out;
    dump_value(doc, out, indent, 0);
    out += '\n';
    return out;
}

void write_report_file(const ordered_json& doc, const std::string& path)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw NumericsError("cannot open output file: " + path);
    f << dump_report(doc);
    if (!f)
        throw NumericsError("failed writing output file: " + path);
}

} // namespace sclame
