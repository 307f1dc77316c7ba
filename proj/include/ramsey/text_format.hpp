#pragma once

#include <ramsey/structure.hpp>

#include <fstream>
#include <functional>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ramsey
{
    class ParseError : public std::runtime_error
    {
    public:
        ParseError(int line, const std::string & message) :
            std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
            line_number(line)
        {
        }

        int line_number;
    };

    struct TextLine
    {
        int number = 0;
        std::vector<std::string> tokens;
    };

    // Splits input into whitespace-separated tokens per line, dropping
    // comments and blank lines.
    inline auto read_lines(std::istream & in) -> std::vector<TextLine>
    {
        std::vector<TextLine> out;
        std::string raw;
        int number = 0;
        while (std::getline(in, raw)) {
            ++number;
            if (auto hash = raw.find('#'); hash != std::string::npos)
                raw.erase(hash);
            std::istringstream words(raw);
            TextLine line{number, {}};
            for (std::string w; words >> w;)
                line.tokens.push_back(w);
            if (! line.tokens.empty())
                out.push_back(std::move(line));
        }
        if (out.empty())
            throw ParseError(0, "empty input");
        return out;
    }

    inline auto parse_int(const TextLine & line, const std::string & token) -> int
    {
        try {
            std::size_t used = 0;
            int v = std::stoi(token, &used);
            if (used != token.size())
                throw std::invalid_argument(token);
            return v;
        }
        catch (const std::exception &) {
            throw ParseError(line.number, "expected an integer, got '" + token + "'");
        }
    }

    // Lines the structure reader does not understand are handed to `extra`
    // (which may throw ParseError); without a handler they are errors.
    using ExtraLineHandler = std::function<void(const TextLine &, Structure &)>;

    inline auto lookup_vertex(const Structure & s, const TextLine & line, const std::string & name) -> Vertex
    {
        auto v = s.vertex(name);
        if (! v)
            throw ParseError(line.number, "unknown vertex '" + name + "'");
        return *v;
    }

    inline auto parse_structure(const std::vector<TextLine> & lines, const ExtraLineHandler & extra = {}) -> Structure
    {
        Language lang;
        std::size_t i = 0;
        for (; i < lines.size() && lines[i].tokens[0] == "lang"; ++i) {
            auto & l = lines[i];
            auto & t = l.tokens;
            try {
                if (t.size() == 2 && t[1] == "order")
                    lang.ordered = true;
                else if (t.size() == 4 && t[1] == "rel")
                    lang.add_relation(t[2], parse_int(l, t[3]));
                else if ((t.size() == 5 || (t.size() == 6 && t[5] == "ordered")) && t[1] == "fun")
                    lang.add_function(t[2], parse_int(l, t[3]), parse_int(l, t[4]), t.size() == 6);
                else
                    throw ParseError(l.number, "malformed lang line");
            }
            catch (const std::invalid_argument & e) {
                throw ParseError(l.number, e.what());
            }
        }

        for (std::size_t k = i; k < lines.size(); ++k)
            if (lines[k].tokens[0] == "order")
                lang.ordered = true;

        Structure s(lang);
        const TextLine * order_line = nullptr;
        for (; i < lines.size(); ++i) {
            auto & l = lines[i];
            auto & t = l.tokens;
            try {
                if (t[0] == "lang")
                    throw ParseError(l.number, "lang lines must come first");
                else if (t[0] == "vertex") {
                    if (t.size() < 2)
                        throw ParseError(l.number, "vertex needs a name");
                    for (std::size_t k = 1; k < t.size(); ++k)
                        s.add_vertex(t[k]);
                }
                else if (t[0] == "rel") {
                    if (t.size() < 2)
                        throw ParseError(l.number, "rel needs a symbol");
                    auto r = lang.relation_index(t[1]);
                    if (! r)
                        throw ParseError(l.number, "unknown relation '" + t[1] + "'");
                    Tuple tuple;
                    for (std::size_t k = 2; k < t.size(); ++k)
                        tuple.push_back(lookup_vertex(s, l, t[k]));
                    s.add_tuple(*r, std::move(tuple));
                }
                else if (t[0] == "fun") {
                    if (t.size() < 2)
                        throw ParseError(l.number, "fun needs a symbol");
                    auto f = lang.function_index(t[1]);
                    if (! f)
                        throw ParseError(l.number, "unknown function '" + t[1] + "'");
                    Tuple domain, image;
                    bool after_colon = false;
                    for (std::size_t k = 2; k < t.size(); ++k) {
                        if (t[k] == ":") {
                            if (after_colon)
                                throw ParseError(l.number, "second ':' in fun line");
                            after_colon = true;
                            continue;
                        }
                        (after_colon ? image : domain).push_back(lookup_vertex(s, l, t[k]));
                    }
                    if (! after_colon)
                        throw ParseError(l.number, "fun line needs ':' between domain and image");
                    if (s.image(*f, domain))
                        throw ParseError(l.number, "function value defined twice");
                    s.set_function(*f, std::move(domain), std::move(image));
                }
                else if (t[0] == "order") {
                    if (order_line)
                        throw ParseError(l.number, "second order line");
                    order_line = &l;
                }
                else if (extra)
                    extra(l, s);
                else
                    throw ParseError(l.number, "unknown keyword '" + t[0] + "'");
            }
            catch (const std::invalid_argument & e) {
                throw ParseError(l.number, e.what());
            }
        }
        if (order_line) {
            std::vector<Vertex> seq;
            for (std::size_t k = 1; k < order_line->tokens.size(); ++k)
                seq.push_back(lookup_vertex(s, *order_line, order_line->tokens[k]));
            try {
                s.set_order(seq);
            }
            catch (const std::invalid_argument & e) {
                throw ParseError(order_line->number, e.what());
            }
        }
        return s;
    }

    inline auto parse_structure(std::istream & in, const ExtraLineHandler & extra = {}) -> Structure
    {
        return parse_structure(read_lines(in), extra);
    }

    inline auto parse_structure_string(const std::string & text, const ExtraLineHandler & extra = {}) -> Structure
    {
        std::istringstream in(text);
        return parse_structure(in, extra);
    }

    inline auto read_file(const std::string & path) -> std::vector<TextLine>
    {
        std::ifstream in(path);
        if (! in)
            throw ParseError(0, "cannot open " + path);
        try {
            return read_lines(in);
        }
        catch (const ParseError & e) {
            throw ParseError(0, path + ": " + e.what());
        }
    }

    inline auto format_language(const Language & lang) -> std::string
    {
        std::string out;
        for (auto & r : lang.relations)
            out += "lang rel " + r.name + " " + std::to_string(r.arity) + "\n";
        for (auto & f : lang.functions)
            out += "lang fun " + f.name + " " + std::to_string(f.domain_arity) + " " + std::to_string(f.range_arity) +
                (f.ordered_image ? " ordered" : "") + "\n";
        if (lang.ordered)
            out += "lang order\n";
        return out;
    }

    // Canonical text form: language, vertices in index order, tuples sorted by
    // vertex index, then the order. Parsing the output reproduces s exactly.
    inline auto format_structure(const Structure & s) -> std::string
    {
        std::string out = format_language(s.language);
        for (auto & n : s.names)
            out += "vertex " + n + "\n";
        for (int r = 0; r < int(s.relations.size()); ++r)
            for (auto & t : s.relations[r]) {
                out += "rel " + s.language.relations[r].name;
                for (auto v : t)
                    out += " " + s.names[v];
                out += "\n";
            }
        for (int f = 0; f < int(s.functions.size()); ++f)
            for (auto & [d, img] : s.functions[f]) {
                out += "fun " + s.language.functions[f].name;
                for (auto v : d)
                    out += " " + s.names[v];
                out += " :";
                for (auto v : img)
                    out += " " + s.names[v];
                out += "\n";
            }
        if (s.ordered() && s.size() > 0) {
            out += "order";
            for (auto v : s.order_sequence())
                out += " " + s.names[v];
            out += "\n";
        }
        return out;
    }
}
