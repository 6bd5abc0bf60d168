#include "dri/instance.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace dri {

    namespace {

        using ordered_json = nlohmann::ordered_json;

        // Strips surrounding whitespace (including trailing \r from CRLF files).
        std::string trim(const std::string& s) {
            const char* ws = " \t\r\n";
            auto begin = s.find_first_not_of(ws);
            if (begin == std::string::npos) return "";
            auto end = s.find_last_not_of(ws);
            return s.substr(begin, end - begin + 1);
        }

        // Splits a line into whitespace-separated tokens.
        std::vector<std::string> tokenize(const std::string& line) {
            std::vector<std::string> tokens;
            std::istringstream in(line);
            std::string tok;
            while (in >> tok) tokens.push_back(tok);
            return tokens;
        }

        double parse_number(const std::string& token, int line) {
            try {
                std::size_t used = 0;
                const double value = std::stod(token, &used);
                if (used != token.size()) throw std::invalid_argument(token);
                return value;
            } catch (const std::exception&) {
                throw ParseError(line, "non-numeric field '" + token + "' at line " + std::to_string(line));
            }
        }

        double apply_convention(double d, DistanceConvention convention) {
            switch (convention) {
                case DistanceConvention::round_2_decimals: return std::round(d * 100.0) / 100.0;
                case DistanceConvention::truncate_1_decimal: return std::floor(d * 10.0) / 10.0;
                case DistanceConvention::exact: break;
            }
            return d;
        }

        // Full-precision number that survives a text round trip.
        std::string format_number(double v) {
            char buf[64];
            if (v == std::floor(v) && std::abs(v) < 1e15) {
                std::snprintf(buf, sizeof(buf), "%.0f", v);
            } else {
                std::snprintf(buf, sizeof(buf), "%.17g", v);
            }
            return buf;
        }

    }  // namespace

    double Instance::total_demand() const {
        double sum = 0.0;
        for (const Vertex& v : vertices) sum += v.demand;
        return sum;
    }

    void Instance::finalize(DistanceConvention convention) {
        if (vertices.empty()) throw std::invalid_argument("instance has no vertices");
        if (capacity <= 0.0) throw std::invalid_argument("capacity must be positive");
        if (fleet_size < 1) throw std::invalid_argument("fleet size must be positive");
        if (depot().demand != 0.0 || depot().service != 0.0)
            throw std::invalid_argument("depot must have zero demand and zero service time");
        for (const Vertex& v : vertices) {
            if (v.ready > v.due)
                throw std::invalid_argument("time window inverted for vertex " + std::to_string(v.id));
            if (v.demand < 0.0 || v.service < 0.0)
                throw std::invalid_argument("negative demand or service time for vertex " + std::to_string(v.id));
            if (v.demand > capacity)
                throw std::invalid_argument("demand of vertex " + std::to_string(v.id) + " exceeds capacity");
        }
        convention_used = convention;
        const int count = size();
        cost_matrix.assign(static_cast<std::size_t>(count) * count, 0.0);
        for (int i = 0; i < count; ++i) {
            for (int j = i + 1; j < count; ++j) {
                const double dx = vertices[i].x - vertices[j].x;
                const double dy = vertices[i].y - vertices[j].y;
                const double d = apply_convention(std::sqrt(dx * dx + dy * dy), convention);
                cost_matrix[static_cast<std::size_t>(i) * count + j] = d;
                cost_matrix[static_cast<std::size_t>(j) * count + i] = d;
            }
        }
        time_matrix = cost_matrix;  // benchmark convention: travel time equals distance
    }

    Instance parse_instance(const std::string& text, DistanceConvention convention) {
        std::vector<std::string> lines;
        {
            std::istringstream in(text);
            std::string line;
            while (std::getline(in, line)) lines.push_back(line);
        }

        Instance instance;
        std::size_t pos = 0;
        auto next_content = [&]() -> int {
            while (pos < lines.size() && trim(lines[pos]).empty()) ++pos;
            if (pos >= lines.size()) return -1;
            return static_cast<int>(pos++);  // 0-based index of a non-blank line
        };

        const int name_line = next_content();
        if (name_line < 0) throw ParseError(1, "empty instance file");
        instance.name = trim(lines[name_line]);

        // VEHICLE section: header word, column header, then "m Q".
        int line = next_content();
        if (line < 0 || trim(lines[line]) != "VEHICLE")
            throw ParseError(line + 1, "expected VEHICLE section at line " + std::to_string(line + 1));
        line = next_content();  // NUMBER CAPACITY header
        if (line < 0) throw ParseError(static_cast<int>(lines.size()), "truncated VEHICLE section");
        line = next_content();
        if (line < 0) throw ParseError(static_cast<int>(lines.size()), "missing fleet line in VEHICLE section");
        {
            const auto tokens = tokenize(lines[line]);
            if (tokens.size() != 2)
                throw ParseError(line + 1, "malformed fleet line at line " + std::to_string(line + 1) +
                                               " (expected 'NUMBER CAPACITY' values)");
            instance.fleet_size = static_cast<int>(parse_number(tokens[0], line + 1));
            instance.capacity = parse_number(tokens[1], line + 1);
        }

        // CUSTOMER section: header word, column header, then one row per vertex.
        line = next_content();
        if (line < 0 || trim(lines[line]) != "CUSTOMER")
            throw ParseError(line + 1, "expected CUSTOMER section at line " + std::to_string(line + 1));
        line = next_content();  // column header
        if (line < 0) throw ParseError(static_cast<int>(lines.size()), "truncated CUSTOMER section");

        std::vector<std::pair<int, Vertex>> rows;  // (line number, vertex)
        for (int data = next_content(); data >= 0; data = next_content()) {
            const auto tokens = tokenize(lines[data]);
            if (tokens.size() != 7)
                throw ParseError(data + 1, "malformed customer row at line " + std::to_string(data + 1) +
                                               " (expected 7 columns, got " + std::to_string(tokens.size()) + ")");
            Vertex v;
            v.id = static_cast<int>(parse_number(tokens[0], data + 1));
            v.x = parse_number(tokens[1], data + 1);
            v.y = parse_number(tokens[2], data + 1);
            v.demand = parse_number(tokens[3], data + 1);
            v.ready = parse_number(tokens[4], data + 1);
            v.due = parse_number(tokens[5], data + 1);
            v.service = parse_number(tokens[6], data + 1);
            if (v.ready > v.due)
                throw ParseError(data + 1, "time window inverted at line " + std::to_string(data + 1) +
                                               " (vertex " + std::to_string(v.id) + ")");
            rows.emplace_back(data + 1, v);
        }
        if (rows.empty()) throw ParseError(static_cast<int>(lines.size()), "no customer rows found");

        instance.vertices.resize(rows.size());
        std::vector<bool> seen(rows.size(), false);
        for (const auto& [row_line, v] : rows) {
            if (v.id < 0 || v.id >= static_cast<int>(rows.size()))
                throw ParseError(row_line, "vertex id " + std::to_string(v.id) + " out of range at line " +
                                               std::to_string(row_line));
            if (seen[v.id])
                throw ParseError(row_line, "duplicate customer id " + std::to_string(v.id) + " at line " +
                                               std::to_string(row_line));
            seen[v.id] = true;
            instance.vertices[v.id] = v;
        }

        try {
            instance.finalize(convention);
        } catch (const std::invalid_argument& e) {
            throw ParseError(0, std::string(e.what()));
        }
        return instance;
    }

    Instance load_instance(const std::string& path, DistanceConvention convention) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open instance file: " + path);
        std::ostringstream buffer;
        buffer << in.rdbuf();
        return parse_instance(buffer.str(), convention);
    }

    std::string instance_to_text(const Instance& instance) {
        std::ostringstream out;
        out << instance.name << "\n\n";
        out << "VEHICLE\n";
        out << "NUMBER     CAPACITY\n";
        out << "  " << instance.fleet_size << "        " << format_number(instance.capacity) << "\n\n";
        out << "CUSTOMER\n";
        out << "CUST NO.  XCOORD.   YCOORD.    DEMAND   READY TIME   DUE DATE   SERVICE TIME\n\n";
        for (const Vertex& v : instance.vertices) {
            out << "    " << v.id << "    " << format_number(v.x) << "    " << format_number(v.y) << "    "
                << format_number(v.demand) << "    " << format_number(v.ready) << "    " << format_number(v.due)
                << "    " << format_number(v.service) << "\n";
        }
        return out.str();
    }

    std::string Infeasibility::message() const {
        std::string what;
        switch (kind) {
            case Kind::time_window: what = "time window violated"; break;
            case Kind::capacity: what = "capacity exceeded"; break;
            case Kind::depot_closing: what = "depot closing time missed"; break;
        }
        if (position >= 0)
            what += " at visit " + std::to_string(position) + " (customer " + std::to_string(customer) + ")";
        else
            what += " on the return leg";
        return what;
    }

    ScheduleResult propagate_schedule(const Instance& instance, const std::vector<int>& visits) {
        assert([&] {
            std::vector<int> copy = visits;
            std::sort(copy.begin(), copy.end());
            return std::adjacent_find(copy.begin(), copy.end()) == copy.end();
        }() && "visit sequence must not repeat a customer");

        const Vertex& depot = instance.depot();
        ScheduledRoute route;
        route.visits = visits;
        route.start.reserve(visits.size());

        double depart = depot.ready;  // earliest possible departure from the depot
        double load = 0.0;
        double distance = 0.0;
        int prev = 0;
        for (std::size_t k = 0; k < visits.size(); ++k) {
            const int id = visits[k];
            const Vertex& v = instance.vertex(id);
            load += v.demand;
            if (load > instance.capacity)
                return {std::nullopt,
                        Infeasibility{Infeasibility::Kind::capacity, static_cast<int>(k), id}};
            const double start = std::max(v.ready, depart + instance.travel_time(prev, id));
            if (start > v.due)
                return {std::nullopt,
                        Infeasibility{Infeasibility::Kind::time_window, static_cast<int>(k), id}};
            route.start.push_back(start);
            distance += instance.cost(prev, id);
            depart = start + v.service;
            prev = id;
        }
        const double back = depart + instance.travel_time(prev, 0);
        if (back > depot.due)
            return {std::nullopt, Infeasibility{Infeasibility::Kind::depot_closing, -1, 0}};
        distance += instance.cost(prev, 0);
        route.load = load;
        route.distance = distance;
        route.depot_return = back;
        return {std::move(route), std::nullopt};
    }

    double solution_cost(const Solution& solution) {
        double total = 0.0;
        for (const ScheduledRoute& route : solution.routes) total += route.distance;
        return total;
    }

    FeasibilityReport verify_solution(const Instance& instance, const Solution& solution) {
        FeasibilityReport report;
        std::vector<int> count(instance.size(), 0);
        bool routes_ok = true;

        for (std::size_t r = 0; r < solution.routes.size(); ++r) {
            const ScheduledRoute& route = solution.routes[r];
            for (int id : route.visits) {
                if (id < 1 || id > instance.customers()) {
                    report.violations.push_back("route " + std::to_string(r) + " visits unknown vertex " +
                                                std::to_string(id));
                    routes_ok = false;
                } else {
                    ++count[id];
                }
            }
            const ScheduleResult res = propagate_schedule(instance, route.visits);
            if (!res.feasible()) {
                report.violations.push_back("route " + std::to_string(r) + ": " + res.reason->message());
                routes_ok = false;
            }
        }

        for (int id = 1; id <= instance.customers(); ++id) {
            if (count[id] == 0) {
                report.violations.push_back("customer " + std::to_string(id) + " is not served");
                routes_ok = false;
            } else if (count[id] > 1) {
                report.violations.push_back("customer " + std::to_string(id) + " is served " +
                                            std::to_string(count[id]) + " times");
                routes_ok = false;
            }
        }

        report.fleet_feasible = static_cast<int>(solution.routes.size()) <= instance.fleet_size;
        if (!report.fleet_feasible)
            report.violations.push_back("uses " + std::to_string(solution.routes.size()) + " routes but only " +
                                        std::to_string(instance.fleet_size) + " vehicles are available");
        report.feasible = routes_ok;
        return report;
    }

    std::string solution_to_json(const Solution& solution) {
        ordered_json doc;
        doc["instance"] = solution.instance_name;
        doc["cost"] = solution.total_cost;
        doc["fleet_feasible"] = solution.fleet_feasible;
        doc["routes"] = ordered_json::array();
        for (std::size_t r = 0; r < solution.routes.size(); ++r) {
            const ScheduledRoute& route = solution.routes[r];
            ordered_json item;
            item["vehicle"] = route.vehicle;
            item["origin"] = r < solution.origin.size() ? solution.origin[r] : -1;
            item["visits"] = route.visits;
            item["start_times"] = route.start;
            item["load"] = route.load;
            item["distance"] = route.distance;
            item["depot_return"] = route.depot_return;
            doc["routes"].push_back(std::move(item));
        }
        doc["violations"] = solution.violations;
        return doc.dump(2) + "\n";
    }

    Solution solution_from_json(const std::string& text) {
        const auto doc = nlohmann::json::parse(text);
        Solution solution;
        solution.instance_name = doc.at("instance").get<std::string>();
        solution.total_cost = doc.at("cost").get<double>();
        solution.fleet_feasible = doc.value("fleet_feasible", true);
        for (const auto& item : doc.at("routes")) {
            ScheduledRoute route;
            route.vehicle = item.value("vehicle", 0);
            route.visits = item.at("visits").get<std::vector<int>>();
            if (item.contains("start_times")) route.start = item["start_times"].get<std::vector<double>>();
            route.load = item.value("load", 0.0);
            route.distance = item.value("distance", 0.0);
            route.depot_return = item.value("depot_return", 0.0);
            solution.origin.push_back(item.value("origin", -1));
            solution.routes.push_back(std::move(route));
        }
        if (doc.contains("violations")) solution.violations = doc["violations"].get<std::vector<std::string>>();
        return solution;
    }

}  // namespace dri
