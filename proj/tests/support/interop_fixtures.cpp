#include "interop_fixtures.hpp"

#include <sstream>

namespace fixtures {

std::string reference_model() {
    return R"(ISO-10303-21;
HEADER;
FILE_DESCRIPTION(('ViewDefinition [CoordinationView]'),'2;1');
FILE_NAME('reference.ifc','2024-01-01T00:00:00',(''),(''),'fixture','fixture','');
FILE_SCHEMA(('IFC2X3'));
ENDSEC;
DATA;
#1=IFCPERSON($,'Doe','Jane',$,$,$,$,$);
#2=IFCORGANIZATION($,'Org',$,$,$);
#3=IFCPERSONANDORGANIZATION(#1,#2,$);
#4=IFCAPPLICATION(#2,'1.0','App','App');
#5=IFCOWNERHISTORY(#3,#4,$,.NOCHANGE.,$,$,$,1704067200);
#6=IFCSIUNIT(*,.LENGTHUNIT.,.MILLI.,.METRE.);
#7=IFCSIUNIT(*,.TIMEUNIT.,$,.SECOND.);
#8=IFCDERIVEDUNITELEMENT(#6,1);
#9=IFCDERIVEDUNITELEMENT(#7,-1);
#10=IFCDERIVEDUNIT((#8,#9),.LINEARVELOCITYUNIT.,$);
#11=IFCUNITASSIGNMENT((#6,#7,#10));
#12=IFCCARTESIANPOINT((0.,0.,0.));
#13=IFCAXIS2PLACEMENT3D(#12,$,$);
#14=IFCGEOMETRICREPRESENTATIONCONTEXT($,'Model',3,1.E-05,#13,$);
#15=IFCPROJECT('0YvctVUKr0kugbFTf53O9L',#5,'Project',$,$,$,$,(#14),#11);
#16=IFCLOCALPLACEMENT($,#13);
#17=IFCSITE('1YvctVUKr0kugbFTf53O9L',#5,'Site',$,$,#16,$,$,.ELEMENT.,$,$,$,$,$);
#18=IFCBUILDING('2YvctVUKr0kugbFTf53O9L',#5,'Building',$,$,#16,$,$,.ELEMENT.,$,$,$);
#19=IFCBUILDINGSTOREY('3YvctVUKr0kugbFTf53O9L',#5,'Level 0',$,$,#16,$,$,.ELEMENT.,0.);
#20=IFCWALLSTANDARDCASE('4YvctVUKr0kugbFTf53O9L',#5,'Wall A',$,$,#16,$,$);
#21=IFCWALLSTANDARDCASE('5YvctVUKr0kugbFTf53O9L',#5,'Wall B',$,$,#16,$,$);
#22=IFCWALLSTANDARDCASE('6YvctVUKr0kugbFTf53O9L',#5,'Wall C',$,$,#16,$,$);
#23=IFCWALL('7YvctVUKr0kugbFTf53O9L',#5,'Wall D',$,$,#16,$,$);
#24=IFCWALLTYPE('8YvctVUKr0kugbFTf53O9L',#5,'Wall type',$,$,$,$,$,$,.STANDARD.);
#25=IFCSTAIR('9YvctVUKr0kugbFTf53O9L',#5,'Stair',$,$,#16,$,$,.STRAIGHT_RUN_STAIR.);
#26=IFCSTAIRFLIGHT('AYvctVUKr0kugbFTf53O9L',#5,'Flight',$,$,#16,$,$,12,11,0.175,0.28);
#27=IFCMEMBER('BYvctVUKr0kugbFTf53O9L',#5,'Member 1',$,$,#16,$,$);
#28=IFCMEMBER('CYvctVUKr0kugbFTf53O9L',#5,'Member 2',$,$,#16,$,$);
#29=IFCMEMBERTYPE('DYvctVUKr0kugbFTf53O9L',#5,'Member type',$,$,$,$,$,$,.MEMBER.);
#30=IFCRELAGGREGATES('EYvctVUKr0kugbFTf53O9L',#5,$,$,#15,(#17));
#31=IFCRELAGGREGATES('FYvctVUKr0kugbFTf53O9L',#5,$,$,#17,(#18));
#32=IFCRELAGGREGATES('GYvctVUKr0kugbFTf53O9L',#5,$,$,#18,(#19));
#33=IFCRELCONTAINEDINSPATIALSTRUCTURE('HYvctVUKr0kugbFTf53O9L',#5,$,$,(#20,#21,#22,#23,#25,#26,#27,#28),#19);
ENDSEC;
END-ISO-10303-21;
)";
}

std::string retype(std::string_view spf, std::string_view from, std::string_view to) {
    std::string needle = "=" + std::string(from) + "(";
    std::string replacement = "=" + std::string(to) + "(";
    std::string out(spf);
    for (auto pos = out.find(needle); pos != std::string::npos; pos = out.find(needle, pos + replacement.size()))
        out.replace(pos, needle.size(), replacement);
    return out;
}

std::string without_type(std::string_view spf, std::string_view type) {
    std::string needle = "=" + std::string(type) + "(";
    std::istringstream in{std::string(spf)};
    std::string line, out;
    while (std::getline(in, line))
        if (line.find(needle) == std::string::npos) out += line + "\n";
    return out;
}

}  // namespace fixtures
