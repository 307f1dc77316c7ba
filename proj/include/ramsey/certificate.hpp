#pragma once

#include <openssl/evp.h>

#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace ramsey
{
    inline auto sha256_hex(const std::string & data) -> std::string
    {
        unsigned char digest[EVP_MAX_MD_SIZE];
        unsigned int length = 0;
        if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1)
            throw std::runtime_error("sha256 failed");
        std::string out;
        char buffer[3];
        for (unsigned int i = 0; i < length; ++i) {
            std::snprintf(buffer, sizeof buffer, "%02x", digest[i]);
            out += buffer;
        }
        return out;
    }

    enum class CheckStatus
    {
        pass,
        fail,
        partial
    };

    inline auto to_string(CheckStatus s) -> std::string
    {
        switch (s) {
        case CheckStatus::pass: return "pass";
        case CheckStatus::fail: return "fail";
        case CheckStatus::partial: return "partial";
        }
        return "?";
    }

    struct CheckedProperty
    {
        std::string name;
        std::string scope;       // what was enumerated
        CheckStatus status = CheckStatus::pass;
        std::string remainder;   // for partial: what was not covered
    };

    // Line-oriented record of one command run. Inputs and artifacts are
    // identified by SHA-256 of their exact bytes.
    struct Certificate
    {
        std::string command;
        std::vector<std::pair<std::string, std::string>> inputs;      // label, hash
        std::vector<std::pair<std::string, std::string>> artifacts;   // label, hash
        std::vector<CheckedProperty> properties;
        std::vector<std::string> counterexamples;

        auto add_input(const std::string & label, const std::string & content) -> void
        {
            inputs.push_back({label, sha256_hex(content)});
        }

        auto add_artifact(const std::string & label, const std::string & content) -> void
        {
            artifacts.push_back({label, sha256_hex(content)});
        }

        auto check(const std::string & name, const std::string & scope, bool ok) -> bool
        {
            properties.push_back({name, scope, ok ? CheckStatus::pass : CheckStatus::fail, {}});
            return ok;
        }

        auto partial(const std::string & name, const std::string & scope, const std::string & remainder) -> void
        {
            properties.push_back({name, scope, CheckStatus::partial, remainder});
        }

        auto failed() const -> bool
        {
            for (auto & p : properties)
                if (p.status == CheckStatus::fail)
                    return true;
            return false;
        }

        auto render() const -> std::string
        {
            std::string out = "certificate 1\ncommand " + command + "\n";
            for (auto & [label, hash] : inputs)
                out += "input " + label + " sha256 " + hash + "\n";
            for (auto & [label, hash] : artifacts)
                out += "artifact " + label + " sha256 " + hash + "\n";
            for (auto & p : properties) {
                out += "property " + p.name + " status " + to_string(p.status) + " scope " + p.scope + "\n";
                if (p.status == CheckStatus::partial)
                    out += "  uncovered " + p.remainder + "\n";
            }
            for (auto & c : counterexamples) {
                out += "counterexample\n";
                std::size_t start = 0;
                while (start < c.size()) {
                    auto end = c.find('\n', start);
                    if (end == std::string::npos)
                        end = c.size();
                    out += "  " + c.substr(start, end - start) + "\n";
                    start = end + 1;
                }
            }
            return out + "end\n";
        }
    };
}
