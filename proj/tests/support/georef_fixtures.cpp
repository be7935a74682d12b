#include "georef_fixtures.hpp"

#include "ifcaudit/spf.hpp"


namespace ifcaudit::testing {

using georef::Level;
using V = GeorefFixtureValues;

std::string georef_fixture(std::optional<Level> level, schema::SchemaVersion version) {
    auto r = [](double d) { return spf::format_real(d); };
    std::string schema_name(schema::to_string(version));

    std::string wcs_point = "#20=IFCCARTESIANPOINT((0.,0.,0.));\n";
    std::string true_north = "$";
    std::string site_point = "#30=IFCCARTESIANPOINT((0.,0.,0.));\n";
    std::string site_extra = "$,$,$,$,$";  // RefLatitude .. SiteAddress
    std::string extra;

    if (level == Level::L10) {
        site_extra = "$,$,$,$,#90";
        extra += "#90=IFCPOSTALADDRESS($,$,$,$,('Via Roma 1','Scala B'),$,'Torino','TO','10121','Italy');\n";
    } else if (level == Level::L20) {
        site_extra = "(52,0,0,0),(4,30,0,0)," + r(V::kElevation) + ",$,$";
    } else if (level == Level::L30) {
        site_point = "#30=IFCCARTESIANPOINT((" + r(V::kSiteX) + "," + r(V::kSiteY) + "," + r(V::kSiteZ) + "));\n";
    } else if (level == Level::L40) {
        wcs_point = "#20=IFCCARTESIANPOINT((" + r(V::kWcsX) + "," + r(V::kWcsY) + "," + r(V::kWcsZ) + "));\n";
        true_north = "#23";
        extra += "#23=IFCDIRECTION((" + r(V::kNorthX) + "," + r(V::kNorthY) + "));\n";
    } else if (level == Level::L50) {
        extra += std::string("#91=IFCPROJECTEDCRS('") + V::kCrs + "','ETRS89 / UTM zone 32N',$,$,$,$,#13);\n";
        extra += "#92=IFCMAPCONVERSION(#22,#91," + r(V::kEastings) + "," + r(V::kNorthings) + "," + r(V::kHeight) +
                 "," + r(V::kAbscissa) + "," + r(V::kOrdinate) + ",$);\n";
    }

    std::string s =
        "ISO-10303-21;\nHEADER;\nFILE_DESCRIPTION(('ViewDefinition [CoordinationView]'),'2;1');\n"
        "FILE_NAME('georef.ifc','2024-01-01T00:00:00',(''),(''),'','','');\n"
        "FILE_SCHEMA(('" + schema_name + "'));\nENDSEC;\nDATA;\n";
    s += "#1=IFCPROJECT('0YvctVUKr0kugbFTf53O9L',$,'P',$,$,$,$,(#22),#10);\n";
    s += "#10=IFCUNITASSIGNMENT((#11,#12));\n";
    s += "#11=IFCSIUNIT(*,.PLANEANGLEUNIT.,$,.RADIAN.);\n";
    s += "#12=IFCSIUNIT(*,.LENGTHUNIT.,$,.METRE.);\n";
    s += "#13=IFCSIUNIT(*,.LENGTHUNIT.,$,.METRE.);\n";
    s += wcs_point;
    s += "#21=IFCAXIS2PLACEMENT3D(#20,$,$);\n";
    s += "#22=IFCGEOMETRICREPRESENTATIONCONTEXT($,'Model',3,1.E-05,#21," + true_north + ");\n";
    s += site_point;
    s += "#31=IFCAXIS2PLACEMENT3D(#30,$,$);\n";
    s += "#32=IFCLOCALPLACEMENT($,#31);\n";
    s += "#40=IFCSITE('1YvctVUKr0kugbFTf53O9L',$,'Site',$,$,#32,$,$,.ELEMENT.," + site_extra + ");\n";
    s += "#41=IFCBUILDING('2YvctVUKr0kugbFTf53O9L',$,'Building',$,$,$,$,$,.ELEMENT.,$,$,$);\n";
    s += "#42=IFCRELAGGREGATES('3YvctVUKr0kugbFTf53O9L',$,$,$,#1,(#40));\n";
    s += "#43=IFCRELAGGREGATES('4YvctVUKr0kugbFTf53O9L',$,$,$,#40,(#41));\n";
    s += extra;
    s += "ENDSEC;\nEND-ISO-10303-21;\n";
    return s;
}

}  // namespace ifcaudit::testing
