#pragma once

// Minimal structural JSON-schema checker for the shipped schema files:
// supports type (string or union), required, properties, items, enum and
// local-file $ref. Enough to pin the CLI output shapes in tests.

#include <fstream>
#include <string>

#include <json.hpp>

namespace schema {

using nlohmann::json;

inline json load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open schema " + path);
    return json::parse(f);
}

inline bool type_matches(const std::string& type, const json& doc) {
    if (type == "object") return doc.is_object();
    if (type == "array") return doc.is_array();
    if (type == "string") return doc.is_string();
    if (type == "number") return doc.is_number();
    if (type == "integer") return doc.is_number_integer() || doc.is_number_unsigned();
    if (type == "boolean") return doc.is_boolean();
    if (type == "null") return doc.is_null();
    return false;
}

inline bool validate(const json& sch, const json& doc, const std::string& schema_dir,
                     std::string& error, const std::string& where = "$") {
    if (sch.contains("$ref")) {
        json ref = load(schema_dir + "/" + sch["$ref"].get<std::string>());
        return validate(ref, doc, schema_dir, error, where);
    }
    if (sch.contains("enum")) {
        for (const auto& v : sch["enum"])
            if (v == doc) return true;
        error = where + ": value not in enum";
        return false;
    }
    if (sch.contains("type")) {
        const json& t = sch["type"];
        bool ok = false;
        if (t.is_string()) ok = type_matches(t.get<std::string>(), doc);
        else
            for (const auto& alt : t) ok = ok || type_matches(alt.get<std::string>(), doc);
        if (!ok) {
            error = where + ": type mismatch";
            return false;
        }
    }
    if (doc.is_object()) {
        if (sch.contains("required"))
            for (const auto& key : sch["required"])
                if (!doc.contains(key.get<std::string>())) {
                    error = where + ": missing required key " + key.get<std::string>();
                    return false;
                }
        if (sch.contains("properties"))
            for (auto it = sch["properties"].begin(); it != sch["properties"].end(); ++it)
                if (doc.contains(it.key()))
                    if (!validate(it.value(), doc[it.key()], schema_dir, error,
                                  where + "." + it.key()))
                        return false;
    }
    if (doc.is_array() && sch.contains("items")) {
        int i = 0;
        for (const auto& item : doc) {
            if (!validate(sch["items"], item, schema_dir, error,
                          where + "[" + std::to_string(i) + "]"))
                return false;
            ++i;
        }
    }
    return true;
}

}  // namespace schema
