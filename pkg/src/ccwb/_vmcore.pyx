# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled execution engine for the toy machine.

Mirrors ``_vmpure.execute`` exactly, with one restriction: the accumulator
and memory cells are kept in unsigned 64-bit registers.  Any operation whose
result would not fit raises :class:`Bailout`, and the caller re-runs the
whole execution on the pure engine.  Results never differ between the two
engines; the compiled core is purely a speedup for the (overwhelmingly
common) runs whose values stay below 2**64.
"""

from cython.operator cimport dereference as deref
from cython.operator cimport preincrement as inc
from libc.stdint cimport INT64_MAX, UINT64_MAX, int64_t, uint8_t, uint32_t, uint64_t
from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector

cdef enum:
    OP_HALT = 0
    OP_LDI = 1
    OP_LDM = 2
    OP_LDX = 3
    OP_STM = 4
    OP_STX = 5
    OP_ADD = 6
    OP_SUB = 7
    OP_MUL = 8
    OP_DIV = 9
    OP_MOD = 10
    OP_JMP = 11
    OP_JZ = 12
    OP_JNZ = 13
    OP_NEXTBIT = 14
    OP_NEXTARG = 15
    OP_OUTBIT = 16


class Bailout(Exception):
    """A value left the 64-bit fast path; re-run on the pure engine."""


cdef inline uint64_t _mem_get(unordered_map[uint64_t, uint64_t]& mem, uint64_t addr):
    cdef unordered_map[uint64_t, uint64_t].iterator it = mem.find(addr)
    if it == mem.end():
        return 0
    return deref(it).second


def execute(const uint8_t[::1] opcodes, const uint32_t[::1] operands, inputs, fuel_in):
    """Run a decoded program; same contract as the pure engine."""
    cdef int64_t fuel
    if fuel_in > INT64_MAX:
        fuel = INT64_MAX
    else:
        fuel = fuel_in

    cdef Py_ssize_t n = opcodes.shape[0]
    cdef vector[vector[uint8_t]] args
    cdef const uint8_t[::1] view
    for data in inputs:
        view = data
        args.push_back(vector[uint8_t]())
        if view.shape[0] > 0:
            args.back().assign(&view[0], (&view[0]) + view.shape[0])

    cdef uint64_t pc = 0
    cdef uint64_t acc = 0
    cdef unordered_map[uint64_t, uint64_t] mem
    cdef unordered_map[uint64_t, vector[uint8_t]] outs
    cdef uint64_t count = 0
    cdef Py_ssize_t arg = 0
    cdef Py_ssize_t off = 0
    cdef Py_ssize_t nin = len(inputs)
    cdef int op
    cdef uint32_t a
    cdef uint64_t v
    cdef bint overflow = False

    while True:
        if pc >= <uint64_t> n:
            break
        if fuel == 0:
            return (False, {}, 0)
        fuel -= 1
        op = opcodes[pc]
        a = operands[pc]
        if op == OP_NEXTBIT:
            if arg >= nin:
                break
            if off < <Py_ssize_t> args[arg].size():
                acc = args[arg][off]
                off += 1
            else:
                acc = 2
            pc += 1
        elif op == OP_LDM:
            acc = _mem_get(mem, a)
            pc += 1
        elif op == OP_STM:
            mem[<uint64_t> a] = acc
            pc += 1
        elif op == OP_ADD:
            v = _mem_get(mem, a)
            if acc > UINT64_MAX - v:
                overflow = True
                break
            acc += v
            pc += 1
        elif op == OP_SUB:
            v = _mem_get(mem, a)
            acc = acc - v if acc > v else 0
            pc += 1
        elif op == OP_MUL:
            v = _mem_get(mem, a)
            if v != 0 and acc > UINT64_MAX / v:
                overflow = True
                break
            acc *= v
            pc += 1
        elif op == OP_JZ:
            pc = a if acc == 0 else pc + 1
        elif op == OP_JNZ:
            pc = a if acc != 0 else pc + 1
        elif op == OP_JMP:
            pc = a
        elif op == OP_LDI:
            acc = a
            pc += 1
        elif op == OP_LDX:
            acc = _mem_get(mem, _mem_get(mem, a))
            pc += 1
        elif op == OP_STX:
            mem[_mem_get(mem, a)] = acc
            pc += 1
        elif op == OP_DIV:
            v = _mem_get(mem, a)
            acc = acc / v if v else 0
            pc += 1
        elif op == OP_MOD:
            v = _mem_get(mem, a)
            acc = acc % v if v else 0
            pc += 1
        elif op == OP_OUTBIT:
            if a:
                outs[<uint64_t> a].push_back(<uint8_t> (acc & 1))
                if a > count:
                    count = a
            pc += 1
        elif op == OP_NEXTARG:
            if arg + 1 >= nin:
                break
            arg += 1
            off = 0
            pc += 1
        else:
            break

    if overflow:
        raise Bailout()

    written = {}
    cdef unordered_map[uint64_t, vector[uint8_t]].iterator it = outs.begin()
    cdef Py_ssize_t size
    while it != outs.end():
        size = <Py_ssize_t> deref(it).second.size()
        if size > 0:
            written[deref(it).first] = (<char*> deref(it).second.data())[:size]
        else:
            written[deref(it).first] = b""
        inc(it)
    return (True, written, count)
