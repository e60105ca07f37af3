#include "dspem/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace dspem {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

bool list_empty(const std::string& s) { return s.empty() || s == "."; }

int parse_genotype(const std::string& s, const std::string& file, std::size_t line) {
    if (s.size() == 1 && s[0] >= '0' && s[0] <= '2') return s[0] - '0';
    throw ParseError(file, line, "expected a genotype in {0,1,2}, got '" + s + "'");
}

std::vector<int> parse_int_list(const std::string& s, const std::string& file,
                                std::size_t line) {
    std::vector<int> out;
    if (list_empty(s)) return out;
    for (const std::string& tok : split(s, ';')) {
        out.push_back(parse_genotype(tok, file, line));
    }
    return out;
}

std::vector<bool> parse_bit_list(const std::string& s, const std::string& file,
                                 std::size_t line) {
    std::vector<bool> out;
    if (list_empty(s)) return out;
    for (const std::string& tok : split(s, ';')) {
        if (tok == "0") out.push_back(false);
        else if (tok == "1") out.push_back(true);
        else throw ParseError(file, line, "expected a status bit in {0,1}, got '" + tok + "'");
    }
    return out;
}

std::string join_list(const std::vector<std::string>& items) {
    if (items.empty()) return ".";
    std::string out = items.front();
    for (std::size_t i = 1; i < items.size(); ++i) out += ";" + items[i];
    return out;
}

}  // namespace

ParseError::ParseError(const std::string& file, std::size_t line, const std::string& what)
    : std::runtime_error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_family_file(std::ostream& os, const Dataset& data,
                       const std::vector<std::string>& ids) {
    if (ids.size() != data.families.size()) {
        throw std::invalid_argument("write_family_file: ids do not match families");
    }
    os << "#family_id\tm\tf\tc1\tc2\tsib_genotypes\tsib_statuses\n";
    for (std::size_t i = 0; i < data.families.size(); ++i) {
        const FamilyRecord& fam = data.families[i];
        std::vector<std::string> genos, statuses;
        for (const SiblingRecord& sib : fam.siblings) {
            genos.push_back(std::to_string(sib.genotype));
            statuses.push_back(sib.affected ? "1" : "0");
        }
        os << ids[i] << '\t' << fam.m << '\t' << fam.f << '\t' << fam.c1 << '\t'
           << fam.c2 << '\t' << join_list(genos) << '\t' << join_list(statuses)
           << '\n';
    }
}

NamedDataset read_family_file(std::istream& is, const std::string& filename) {
    NamedDataset out;
    std::vector<FamilyRecord> families;
    std::string line;
    std::size_t lineno = 0;
    std::set<std::string> seen;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split(line, '\t');
        if (fields.size() != 7) {
            throw ParseError(filename, lineno,
                             "expected 7 tab-separated fields, got " +
                                 std::to_string(fields.size()));
        }
        FamilyRecord fam;
        fam.m = parse_genotype(fields[1], filename, lineno);
        fam.f = parse_genotype(fields[2], filename, lineno);
        fam.c1 = parse_genotype(fields[3], filename, lineno);
        fam.c2 = parse_genotype(fields[4], filename, lineno);
        const auto genos = parse_int_list(fields[5], filename, lineno);
        const auto statuses = parse_bit_list(fields[6], filename, lineno);
        if (genos.size() != statuses.size()) {
            throw ParseError(filename, lineno,
                             "sibling genotype and status lists differ in length");
        }
        for (std::size_t j = 0; j < genos.size(); ++j) {
            fam.siblings.push_back({genos[j], statuses[j]});
        }
        if (!seen.insert(fields[0]).second) {
            throw ParseError(filename, lineno, "duplicate family id '" + fields[0] + "'");
        }
        out.ids.push_back(fields[0]);
        families.push_back(std::move(fam));
    }
    if (families.empty()) {
        throw ParseError(filename, lineno, "no family rows found");
    }
    try {
        out.data = Dataset::from_families(std::move(families));
    } catch (const FamilyError& e) {
        throw ParseError(filename, 0,
                         std::string(e.what()) + " (family id " +
                             out.ids[e.family_index()] + ")");
    }
    return out;
}

NamedDataset read_family_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ParseError(path, 0, "cannot open file");
    return read_family_file(is, path);
}

void write_family_file(const std::string& path, const Dataset& data,
                       const std::vector<std::string>& ids) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write to " + path);
    write_family_file(os, data, ids);
}

Pedigree read_pedigree_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ParseError(path, 0, "cannot open file");
    Pedigree ped;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split(line, '\t');
        if (fields.size() != 2) {
            throw ParseError(path, lineno, "expected 2 tab-separated fields");
        }
        if (ped.sib_status.count(fields[0])) {
            throw ParseError(path, lineno, "duplicate family id '" + fields[0] + "'");
        }
        ped.family_ids.push_back(fields[0]);
        ped.sib_status[fields[0]] = parse_bit_list(fields[1], path, lineno);
    }
    if (ped.family_ids.empty()) throw ParseError(path, lineno, "no pedigree rows found");
    return ped;
}

std::vector<SnpFamilies> read_scan_file(const std::string& path,
                                        const Pedigree& pedigree,
                                        double completeness) {
    std::ifstream is(path);
    if (!is) throw ParseError(path, 0, "cannot open file");

    struct Row {
        std::string family_id;
        FamilyRecord fam;
        std::size_t lineno;
    };
    std::map<std::string, std::vector<Row>> by_snp;
    std::map<std::string, std::set<std::string>> seen;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split(line, '\t');
        if (fields.size() != 7) {
            throw ParseError(path, lineno, "expected 7 tab-separated fields");
        }
        const std::string& snp = fields[0];
        const std::string& family = fields[1];
        const auto status_it = pedigree.sib_status.find(family);
        if (status_it == pedigree.sib_status.end()) {
            throw ParseError(path, lineno, "family '" + family + "' not in pedigree");
        }
        if (!seen[snp].insert(family).second) {
            throw ParseError(path, lineno,
                             "duplicate row for SNP '" + snp + "', family '" + family + "'");
        }
        Row row;
        row.family_id = family;
        row.lineno = lineno;
        row.fam.m = parse_genotype(fields[2], path, lineno);
        row.fam.f = parse_genotype(fields[3], path, lineno);
        row.fam.c1 = parse_genotype(fields[4], path, lineno);
        row.fam.c2 = parse_genotype(fields[5], path, lineno);
        const auto genos = parse_int_list(fields[6], path, lineno);
        const auto& statuses = status_it->second;
        if (genos.size() != statuses.size()) {
            throw ParseError(path, lineno,
                             "sibling genotypes disagree with pedigree status count for "
                             "family '" + family + "'");
        }
        for (std::size_t j = 0; j < genos.size(); ++j) {
            row.fam.siblings.push_back({genos[j], statuses[j]});
        }
        by_snp[snp].push_back(std::move(row));
    }
    if (by_snp.empty()) throw ParseError(path, lineno, "no scan rows found");

    std::vector<SnpFamilies> out;
    for (auto& [snp, rows] : by_snp) {
        const double cover = static_cast<double>(rows.size()) /
                             static_cast<double>(pedigree.family_ids.size());
        if (cover + 1e-12 < completeness) {
            std::ostringstream os;
            os << "SNP '" << snp << "' covers " << rows.size() << " of "
               << pedigree.family_ids.size() << " pedigree families (threshold "
               << completeness << ")";
            throw ParseError(path, 0, os.str());
        }
        SnpFamilies block;
        block.snp_id = snp;
        std::vector<FamilyRecord> families;
        for (Row& row : rows) {
            block.dataset.ids.push_back(row.family_id);
            families.push_back(std::move(row.fam));
        }
        try {
            block.dataset.data = Dataset::from_families(std::move(families));
        } catch (const FamilyError& e) {
            throw ParseError(path, rows[e.family_index()].lineno,
                             std::string(e.what()) + " (SNP '" + snp + "')");
        }
        out.push_back(std::move(block));
    }
    return out;  // std::map iteration is already sorted by snp id
}

}  // namespace dspem
