#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "dspem/genetics.hpp"

namespace dspem {

// All files are tab-separated UTF-8 with one '#'-prefixed header line.
// Sibling lists are semicolon-joined; "." (or an empty field) means none.

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& what);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

struct NamedDataset {
    Dataset data;
    std::vector<std::string> ids;  // family ids, parallel to data.families
};

void write_family_file(std::ostream& os, const Dataset& data,
                       const std::vector<std::string>& ids);
NamedDataset read_family_file(std::istream& is, const std::string& filename);

NamedDataset read_family_file(const std::string& path);
void write_family_file(const std::string& path, const Dataset& data,
                       const std::vector<std::string>& ids);

// Disease statuses are fixed across SNPs and live in the pedigree file; the
// scan file carries the per-SNP genotype columns.
struct Pedigree {
    std::vector<std::string> family_ids;                  // in file order
    std::map<std::string, std::vector<bool>> sib_status;  // id -> statuses
};

Pedigree read_pedigree_file(const std::string& path);

struct SnpFamilies {
    std::string snp_id;
    NamedDataset dataset;
};

// Joins a long-format scan file against the pedigree. Duplicate
// (snp, family) rows are an error; SNPs covering fewer than
// completeness * |pedigree| families are an error. Blocks are returned
// sorted by snp id.
std::vector<SnpFamilies> read_scan_file(const std::string& path,
                                        const Pedigree& pedigree,
                                        double completeness = 1.0);

// Shortest round-trip decimal formatting (via std::to_chars); deterministic
// and locale-independent.
std::string format_double(double v);

}  // namespace dspem
