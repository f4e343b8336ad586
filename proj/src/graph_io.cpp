#include <istream>
#include <sstream>
#include <string>

#include "bccd/errors.hpp"
#include "bccd/graphs.hpp"

namespace bccd {

namespace {

char near_glyph(Mark m) {
    switch (m) {
        case Mark::Tail: return '-';
        case Mark::Arrow: return '<';
        case Mark::Circle: return 'o';
        default: throw InvariantError("edge without mark");
    }
}

char far_glyph(Mark m) {
    switch (m) {
        case Mark::Tail: return '-';
        case Mark::Arrow: return '>';
        case Mark::Circle: return 'o';
        default: throw InvariantError("edge without mark");
    }
}

std::string render(const EndpointGraph& g) {
    std::ostringstream out;
    out << "nodes: " << g.size() << '\n';
    for (auto [a, b] : g.adjacent_pairs())
        out << a << ' ' << near_glyph(g.mark(a, b)) << '-' << far_glyph(g.mark(b, a)) << ' ' << b << '\n';
    return out.str();
}

struct ParsedEdge {
    NodeId a, b;
    Mark at_a, at_b;
    int line;
};

struct Parsed {
    int nodes = -1;
    std::vector<ParsedEdge> edges;
};

Mark parse_near(char c, int line) {
    switch (c) {
        case '-': return Mark::Tail;
        case '<': return Mark::Arrow;
        case 'o': return Mark::Circle;
        default: throw ParseError(std::string("bad endpoint mark '") + c + "'", line);
    }
}

Mark parse_far(char c, int line) {
    switch (c) {
        case '-': return Mark::Tail;
        case '>': return Mark::Arrow;
        case 'o': return Mark::Circle;
        default: throw ParseError(std::string("bad endpoint mark '") + c + "'", line);
    }
}

NodeId parse_node(const std::string& token, int nodes, int line) {
    std::size_t used = 0;
    int v = -1;
    try {
        v = std::stoi(token, &used);
    } catch (const std::exception&) {
        throw ParseError("bad node id '" + token + "'", line);
    }
    if (used != token.size() || v < 0 || v >= nodes) throw ParseError("bad node id '" + token + "'", line);
    return v;
}

Parsed parse(std::istream& in) {
    Parsed p;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::istringstream tokens(raw);
        std::string first;
        if (!(tokens >> first)) continue;
        if (p.nodes < 0) {
            std::string count;
            if (first != "nodes:" || !(tokens >> count)) throw ParseError("expected 'nodes: <n>' header", line);
            try {
                p.nodes = std::stoi(count);
            } catch (const std::exception&) {
                throw ParseError("bad node count", line);
            }
            if (p.nodes < 0 || p.nodes > kMaxGraphNodes) throw ParseError("node count out of range", line);
            continue;
        }
        std::string glyph, second, extra;
        if (!(tokens >> glyph >> second) || (tokens >> extra)) throw ParseError("expected 'a <m>-<m> b'", line);
        if (glyph.size() != 3 || glyph[1] != '-') throw ParseError("bad edge glyph '" + glyph + "'", line);
        ParsedEdge e{parse_node(first, p.nodes, line), parse_node(second, p.nodes, line), parse_near(glyph[0], line),
                     parse_far(glyph[2], line), line};
        if (e.a == e.b) throw ParseError("self-loop", line);
        p.edges.push_back(e);
    }
    if (p.nodes < 0) throw ParseError("missing 'nodes:' header", line);
    return p;
}

template <typename Fn>
void apply_edges(const Parsed& p, Fn&& fn) {
    for (const ParsedEdge& e : p.edges) {
        try {
            fn(e);
        } catch (const ArgumentError& err) {
            throw ParseError(err.what(), e.line);
        }
    }
}

}  // namespace

std::string to_text(const Dag& g) { return render(Mag::from_dag(g)); }
std::string to_text(const Mag& g) { return render(g); }
std::string to_text(const Pag& g) { return render(g); }

Dag parse_dag(std::istream& in) {
    Parsed p = parse(in);
    Dag g(p.nodes);
    apply_edges(p, [&](const ParsedEdge& e) {
        if (e.at_a == Mark::Tail && e.at_b == Mark::Arrow) g.add_edge(e.a, e.b);
        else if (e.at_a == Mark::Arrow && e.at_b == Mark::Tail) g.add_edge(e.b, e.a);
        else throw ParseError("DAG edges must be directed", e.line);
    });
    return g;
}

Mag parse_mag(std::istream& in) {
    Parsed p = parse(in);
    Mag g(p.nodes);
    apply_edges(p, [&](const ParsedEdge& e) {
        if (g.adjacent(e.a, e.b)) throw ParseError("duplicate edge", e.line);
        g.set_edge(e.a, e.b, e.at_a, e.at_b);
    });
    return g;
}

Pag parse_pag(std::istream& in) {
    Parsed p = parse(in);
    Pag g(p.nodes);
    apply_edges(p, [&](const ParsedEdge& e) {
        if (g.adjacent(e.a, e.b)) throw ParseError("duplicate edge", e.line);
        g.set_edge(e.a, e.b, e.at_a, e.at_b);
    });
    return g;
}

}  // namespace bccd
