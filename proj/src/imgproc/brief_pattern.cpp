#include "posemon/imgproc/features.hpp"

namespace posemon {

// Frozen point-pair table for the binary descriptor. Generated once from a
// seeded uniform draw over the 31x31 patch and committed so descriptors are
// reproducible across runs and implementations.
const std::array<std::array<std::int8_t, 4>, 256> kBriefPattern = {{
    {{-11, 12, 4, -2}}, {{-9, 3, 12, 11}}, {{-2, 5, 0, -6}}, {{4, 10, 9, 10}},
    {{-4, -8, 13, 8}}, {{-2, 3, 5, 5}}, {{4, -3, -3, -1}}, {{13, 4, 15, -5}},
    {{-8, 11, -14, -4}}, {{4, 10, 13, 8}}, {{-7, 9, -7, -11}}, {{4, 10, 5, -8}},
    {{-14, -4, -7, 5}}, {{8, 4, 9, 6}}, {{-14, -9, -12, -3}}, {{-5, -4, 10, -7}},
    {{9, 6, -8, 6}}, {{14, -3, -12, 9}}, {{-14, -2, -8, 11}}, {{7, 11, 11, -8}},
    {{-11, 1, -9, 12}}, {{-1, 11, 12, -15}}, {{-14, -7, 11, 3}}, {{11, -1, -9, -6}},
    {{-12, 3, -5, 10}}, {{-8, -3, -12, 9}}, {{3, -8, -5, 12}}, {{-4, -7, 6, -11}},
    {{-4, -1, -14, -9}}, {{8, 13, -6, 14}}, {{0, 6, -9, -9}}, {{13, 6, 8, 15}},
    {{15, 1, 15, 15}}, {{-3, 6, -15, 6}}, {{13, 15, -10, 3}}, {{5, 1, -1, 14}},
    {{12, -12, 5, -9}}, {{6, -12, -8, -4}}, {{-9, 10, -12, -9}}, {{-11, 15, -7, -5}},
    {{-4, 14, 11, 10}}, {{2, 12, 7, -11}}, {{-15, -11, -9, 1}}, {{-4, 12, -6, -6}},
    {{-12, 4, -8, -7}}, {{13, 9, 1, 13}}, {{-11, -15, -5, 1}}, {{2, -6, 3, -7}},
    {{15, 10, 1, 1}}, {{0, 10, 2, -3}}, {{14, -1, 6, 14}}, {{15, 5, -2, 14}},
    {{11, -7, -8, 7}}, {{9, 10, 1, -9}}, {{4, -7, -8, -7}}, {{-10, 11, 9, 7}},
    {{5, 12, -4, 7}}, {{-3, 11, 12, 9}}, {{-3, -4, -14, 7}}, {{5, 1, -15, 3}},
    {{5, -5, -14, -7}}, {{-10, 11, 7, 12}}, {{7, -12, 7, 10}}, {{9, 13, -12, -12}},
    {{-8, -6, -14, 5}}, {{-11, 11, 1, 10}}, {{7, 2, 3, 2}}, {{3, 2, 12, -9}},
    {{10, -7, 15, 11}}, {{4, -12, -9, -3}}, {{-3, 10, -5, -11}}, {{-4, 1, -1, -5}},
    {{-2, -3, -5, -10}}, {{-13, -3, -1, 12}}, {{13, 1, 11, -12}}, {{8, -2, 15, -8}},
    {{4, 14, 15, 0}}, {{-8, 14, 4, 4}}, {{-5, -3, 15, -6}}, {{-2, 1, -2, 7}},
    {{12, -1, 9, -8}}, {{10, -2, 8, 10}}, {{-8, 2, 10, -15}}, {{10, -12, 14, -8}},
    {{-14, -8, 7, -11}}, {{-11, 6, -6, 6}}, {{-11, -6, 8, -14}}, {{11, -2, 5, -3}},
    {{15, 14, -9, 8}}, {{-15, 7, -5, 14}}, {{7, -1, -7, -6}}, {{-13, -1, -11, -8}},
    {{-6, 6, 6, 10}}, {{2, -5, 11, 14}}, {{9, 5, 7, 1}}, {{9, 7, 8, -1}},
    {{-6, -9, 5, 13}}, {{9, 9, 8, -15}}, {{6, -11, -7, 4}}, {{-9, 11, -6, -6}},
    {{-12, -8, -4, 9}}, {{15, 15, 13, 1}}, {{8, 8, -2, 4}}, {{-15, 5, -6, -14}},
    {{-9, 4, 8, 6}}, {{10, -11, -6, -10}}, {{5, -6, 14, 11}}, {{7, 10, 2, 1}},
    {{-1, 0, 12, -2}}, {{13, 14, 9, -12}}, {{6, -11, 15, 9}}, {{-3, 12, -15, -8}},
    {{0, -7, -15, -12}}, {{-2, -9, -10, -4}}, {{-1, 7, -2, -1}}, {{5, -11, -10, 1}},
    {{3, 4, -14, -13}}, {{-10, -13, 12, 3}}, {{-13, -14, 2, -7}}, {{-5, 11, -1, 12}},
    {{7, -13, -6, 10}}, {{-15, -15, -5, 15}}, {{-6, 10, -13, -9}}, {{-13, 12, 1, -2}},
    {{11, -12, 5, -1}}, {{3, 0, -4, -14}}, {{5, 8, -8, -6}}, {{15, -14, -15, -6}},
    {{-3, 13, -4, 11}}, {{8, 6, -8, -4}}, {{10, 9, -1, 0}}, {{9, -4, -9, 9}},
    {{-14, 8, 1, 7}}, {{6, -6, 13, -15}}, {{-1, 4, -5, -1}}, {{0, 14, -10, -6}},
    {{-15, -4, 6, -13}}, {{-6, -11, -4, -11}}, {{2, -12, 4, -7}}, {{3, -8, -6, -6}},
    {{4, -5, 12, -7}}, {{-1, -8, 11, 7}}, {{15, -5, -15, -5}}, {{9, 10, 9, 8}},
    {{-11, -10, -15, 14}}, {{-3, -11, -10, 9}}, {{5, 9, 14, 11}}, {{7, 4, -12, -15}},
    {{2, -9, 3, -3}}, {{14, 13, 8, 1}}, {{7, -8, 11, -6}}, {{4, 0, -8, -3}},
    {{-4, 12, 9, 0}}, {{-14, -9, 14, 7}}, {{-4, -1, 14, 1}}, {{10, 11, 8, -15}},
    {{0, 11, -2, 13}}, {{-4, -8, 4, -2}}, {{14, 3, 14, -11}}, {{12, -1, -13, -2}},
    {{-10, -2, 0, 3}}, {{15, 9, 11, 0}}, {{-12, 7, -13, 9}}, {{-10, -9, -6, 5}},
    {{-1, 0, 4, 10}}, {{0, -8, 7, 14}}, {{8, -8, -8, -5}}, {{8, 15, 9, -1}},
    {{15, -3, 13, 7}}, {{0, -3, 10, 5}}, {{8, -11, -13, 10}}, {{2, -15, -15, 10}},
    {{-7, 14, 15, 1}}, {{-2, 6, -1, 1}}, {{-3, -13, -13, -15}}, {{-13, 7, 1, 8}},
    {{8, 6, 9, 5}}, {{3, 12, 13, 3}}, {{12, 3, 4, -1}}, {{-8, 8, 2, -2}},
    {{-15, -15, -2, 1}}, {{9, -15, 14, 11}}, {{14, 6, 10, 15}}, {{13, -14, 5, -13}},
    {{1, -6, 11, -7}}, {{-3, -13, 2, 4}}, {{12, -2, 2, 12}}, {{-5, 6, 9, -5}},
    {{8, -11, -3, 7}}, {{5, -6, -15, 2}}, {{9, -7, 3, 15}}, {{-4, -3, -14, 13}},
    {{-9, -5, 12, 9}}, {{1, -14, -13, 1}}, {{3, -6, 9, -8}}, {{5, 10, 9, 12}},
    {{7, -15, -11, 12}}, {{-14, -8, -3, -2}}, {{-3, -1, 0, -4}}, {{14, 2, 15, -2}},
    {{0, -2, 10, 10}}, {{-9, 15, -13, -15}}, {{14, 13, 14, 4}}, {{0, -6, -1, 1}},
    {{12, -12, -12, -6}}, {{-8, -3, -3, 13}}, {{-9, 14, 7, 13}}, {{-2, 13, 15, 14}},
    {{-2, 1, 10, 5}}, {{-9, -9, -12, 0}}, {{10, -6, -5, 10}}, {{-14, 8, 15, 10}},
    {{-7, 6, -10, 1}}, {{10, 4, 3, 12}}, {{11, 3, 15, -12}}, {{2, 0, 15, -3}},
    {{-7, -11, 8, 8}}, {{15, 7, -11, -1}}, {{4, 13, -7, -5}}, {{5, 10, -13, -10}},
    {{6, -5, -5, 13}}, {{4, 3, 2, -5}}, {{13, -14, 11, 3}}, {{11, 12, -7, -2}},
    {{2, -5, 7, 5}}, {{6, 7, -14, 15}}, {{-4, -3, 10, 12}}, {{-4, 5, -11, -9}},
    {{11, -1, -4, 9}}, {{8, 12, -1, -11}}, {{-8, -11, 11, -1}}, {{11, 13, -15, -2}},
    {{10, 1, 2, -11}}, {{-15, -1, -4, -3}}, {{-10, 2, -14, -5}}, {{-9, 7, -5, 2}},
    {{3, -10, -11, 15}}, {{0, 1, 0, -6}}, {{7, 4, 13, 10}}, {{-12, 2, -13, 2}},
    {{15, 15, 11, 9}}, {{-15, -9, 2, -2}}, {{13, -14, -9, -3}}, {{-15, -9, -5, -3}},
    {{5, -6, -1, 0}}, {{-11, 4, 2, 2}}, {{-13, 14, -4, -1}}, {{4, -10, -2, 9}},
    {{-12, 5, 3, -6}}, {{-9, -4, 11, -6}}, {{-12, 7, 4, 10}}, {{-2, -6, 4, 13}},
    {{2, 13, 14, -12}}, {{-13, 10, -9, -1}}, {{-5, -7, 8, 10}}, {{-6, 10, 8, -10}},
}};

}  // namespace posemon
