#include "fracsum/expsum_io.hpp"

#include "fracsum/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace fracsum {

std::string format_shortest(double x)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string format_hex(double x)
{
    char buf[64];
    char* p = buf;
    if (std::signbit(x)) {
        *p++ = '-';
        x = -x;
    }
    if (std::isfinite(x)) {
        *p++ = '0';
        *p++ = 'x';
    }
    auto res = std::to_chars(p, buf + sizeof buf, x, std::chars_format::hex);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s)
{
    std::string_view v(s);
    bool neg = false;
    if (!v.empty() && (v.front() == '-' || v.front() == '+')) {
        neg = v.front() == '-';
        v.remove_prefix(1);
    }
    auto fmt = std::chars_format::general;
    if (v.size() > 2 && v[0] == '0' && (v[1] == 'x' || v[1] == 'X')) {
        v.remove_prefix(2);
        fmt = std::chars_format::hex;
    }
    double x = 0.0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), x, fmt);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size() || v.empty())
        throw IoError("cannot parse number '" + s + "'");
    return neg ? -x : x;
}

void write_expsum(std::ostream& os, const ExpSum& es)
{
    os << "# alpha=" << format_shortest(es.alpha) << " delta=" << format_shortest(es.delta)
       << " T=" << format_shortest(es.T) << " L=" << es.L
       << " epsilon=" << format_shortest(es.epsilon);
    if (es.reduction)
        os << " reduced=true K=" << es.reduction->K << " L_p=" << es.reduction->L_p
           << " L_f=" << es.size();
    os << '\n';
    for (std::size_t l = 0; l < es.size(); ++l)
        os << format_hex(es.weights[l]) << '\t' << format_hex(es.exponents[l]) << '\n';
}

ExpSum read_expsum(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line.rfind("# ", 0) != 0)
        throw IoError("expsum: missing '# alpha=...' header line");

    std::map<std::string, std::string> kv;
    std::istringstream hs(line.substr(2));
    std::string tok;
    while (hs >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos)
            throw IoError("expsum: malformed header field '" + tok + "'");
        kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    auto need = [&](const char* key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end())
            throw IoError(std::string("expsum: header lacks '") + key + "'");
        return it->second;
    };
    auto count = [&](const char* key) {
        const std::string& s = need(key);
        std::size_t v = 0;
        auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size())
            throw IoError(std::string("expsum: bad integer for '") + key + "'");
        return v;
    };

    ExpSum es;
    es.alpha = parse_double(need("alpha"));
    es.delta = parse_double(need("delta"));
    es.T = parse_double(need("T"));
    es.L = count("L");
    es.epsilon = parse_double(need("epsilon"));
    const bool reduced = kv.count("reduced") && kv["reduced"] == "true";
    if (reduced)
        es.reduction = ReductionTag{count("K"), count("L_p")};

    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream ls(line);
        std::string ws, bs;
        if (!(ls >> ws >> bs))
            throw IoError("expsum: expected '<w>\\t<b>' but got '" + line + "'");
        es.weights.push_back(parse_double(ws));
        es.exponents.push_back(parse_double(bs));
        es.nodes.push_back(std::log(-es.exponents.back()));
    }
    if (reduced && count("L_f") != es.size())
        throw IoError("expsum: L_f in header does not match the number of terms");
    try {
        es.validate();
    } catch (const Error& e) {
        throw IoError(std::string("expsum: invalid contents: ") + e.what());
    }
    return es;
}

void save_expsum(const std::filesystem::path& path, const ExpSum& es)
{
    std::ofstream os(path);
    if (!os)
        throw IoError("cannot open '" + path.string() + "' for writing");
    write_expsum(os, es);
    if (!os)
        throw IoError("write to '" + path.string() + "' failed");
}

ExpSum load_expsum(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is)
        throw IoError("cannot open '" + path.string() + "' for reading");
    return read_expsum(is);
}

} // namespace fracsum
