#pragma once

#include "arat/ir.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace arat {

// (object index into DataObjectMap/Program allocations, element index)
struct ObjectRef {
    std::int32_t object = -1;
    std::int64_t element = -1;
    bool valid() const { return object >= 0; }
    bool operator==(const ObjectRef&) const = default;
};

struct OperandRecord {
    Value value;
    std::uint64_t address = 0; // meaningful when has_address
    bool has_address = false;
    ObjectRef ref; // address ref for memory operands, provenance for registers
};

struct TraceRecord {
    std::uint64_t dyn_id = 0;
    std::uint32_t static_id = 0;
    Opcode op = Opcode::Ret;
    ValueType type = ValueType::I64;
    std::vector<OperandRecord> operands;
    bool has_result = false;
    Value result;
    std::uint64_t result_address = 0; // store destination
    bool result_has_address = false;
    ObjectRef result_ref; // dest ref for Store, provenance for Load results
    std::int32_t pred_block = -1;
    std::string source_label;
};

struct DataObject {
    std::string name;
    std::uint64_t base = 0;
    ValueType elem_type = ValueType::F64;
    std::uint64_t count = 0;
};

struct DataObjectMap {
    std::vector<DataObject> objects;
    ObjectRef locate(std::uint64_t address) const;
    std::int32_t find(const std::string& name) const;
    static DataObjectMap from_program(const Program& p);
};

struct Trace {
    std::uint64_t program_hash = 0;
    DataObjectMap objects;
    std::vector<TraceRecord> records;
};

// text by default, length-prefixed binary when binary=true; read autodetects
std::uint64_t write_trace(const Trace& t, std::ostream& out, bool binary = false);
Trace read_trace(std::istream& in);

void write_object_map(const DataObjectMap& m, std::ostream& out);
DataObjectMap read_object_map(std::istream& in);

// fills operand/result provenance refs by a forward pass: Load results carry
// (object, element) of the loaded cell; every other result clears provenance.
void resolve_object_refs(Trace& t, const Program& p);

} // namespace arat
