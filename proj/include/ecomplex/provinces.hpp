#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace ecomplex {

struct Province {
  int id;
  std::string_view code;
  std::string_view name;
};

/// Two-letter province codes, in the reference order. The same table ships
/// as data/provinces.csv.
inline constexpr std::array<Province, 31> kProvinces{{
    {1, "BJ", "Beijing"},       {2, "TJ", "Tianjin"},    {3, "HE", "Hebei"},
    {4, "SX", "Shanxi"},        {5, "NM", "Inner Mongolia"}, {6, "LN", "Liaoning"},
    {7, "JL", "Jilin"},         {8, "HL", "Heilongjiang"}, {9, "SH", "Shanghai"},
    {10, "JS", "Jiangsu"},      {11, "ZJ", "Zhejiang"},  {12, "AH", "Anhui"},
    {13, "FJ", "Fujian"},       {14, "JX", "Jiangxi"},   {15, "SD", "Shandong"},
    {16, "HA", "Henan"},        {17, "HB", "Hubei"},     {18, "HN", "Hunan"},
    {19, "GD", "Guangdong"},    {20, "GX", "Guangxi"},   {21, "HI", "Hainan"},
    {22, "CQ", "Chongqing"},    {23, "SC", "Sichuan"},   {24, "GZ", "Guizhou"},
    {25, "YN", "Yunnan"},       {26, "XZ", "Tibet"},     {27, "SN", "Shaanxi"},
    {28, "GS", "Gansu"},        {29, "QH", "Qinghai"},   {30, "NX", "Ningxia"},
    {31, "XJ", "Xinjiang"},
}};

constexpr std::optional<Province> find_province(std::string_view code) {
  for (const auto& p : kProvinces)
    if (p.code == code) return p;
  return std::nullopt;
}

}  // namespace ecomplex
