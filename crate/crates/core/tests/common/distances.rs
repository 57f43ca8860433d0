//! Hyperbolic distances frozen from 60-digit arithmetic.
#![allow(clippy::excessive_precision)]

/// `(r₁, θ₁, r₂, θ₂, d)` with `d` evaluated at 60 significant digits.
pub const DISTANCES: &[(f64, f64, f64, f64, f64)] = &[
    (5.888913074339623, 6.057004489668788, 9.531021276137848, 1.3316933196683378, 14.713789005923440724),
    (5.392818398224043, 1.676419373354989, 0.27688997602008825, 0.865717141173184, 5.2248247207593626027),
    (7.258096824982473, 1.8477294081702664, 6.427945193145641, 1.7049229553522696, 8.4061249001386953418),
    (3.1581308750181902, 0.4952683356145064, 6.429525707175917, 1.4433624201007202, 8.0261326069898336716),
    (0.8031580736385469, 2.533456714672316, 8.451051439293355, 0.12273151687433748, 9.1465331135654700598),
    (5.541052063103464, 4.1783303441173345, 3.3574009886969614, 5.1199367126520885, 7.3221133016055234488),
    (5.737121857550017, 5.705867731941349, 3.677524896018748, 0.23788358438649262, 7.5675010729187217418),
    (5.833854629864353, 2.105508052819858e-05, 7.1841953958742035, 5.441837990772499, 11.227006241957488812),
    (3.2680277890875087, 3.6376015448189456, 2.6657156306533434, 1.9072948392765396, 5.3925509693574479363),
    (2.505153537409174, 0.6768178395500365, 7.010541866419425, 3.106207823333315, 9.3870352672745999198),
    (4.695197796049459, 1.4911445215930028, 2.143974332248236, 0.30602499440393993, 5.7041367067661448302),
    (3.4877294532452794, 6.25143062197769, 5.911560798926267, 1.5377783378917884, 8.7058227566776278461),
    (5.906686095102881, 4.477122816829969, 9.464311990171275, 2.435229463715502, 15.05207858775785689),
    (7.295751176669722, 1.6046990486601669, 3.1693573310934573, 3.3105835387051235, 9.8996566041707754042),
    (6.620150444249298, 5.0665028282864775, 5.927829561617508, 5.9404607188306935, 10.82821983806295227),
    (2.6995104194403687, 5.565088400474726, 9.361980147769746, 1.8823013105964794, 11.987704107137025156),
    (9.476240302364298, 3.0838257348222156, 0.9799510478627238, 3.9582490536850297, 9.2350619115048860937),
    (3.0184428391070783, 4.45338655972638, 8.152138931885158, 2.0619830419453855, 11.026827592205010941),
    (2.619011233617151, 3.832191730274998, 2.529098082760901, 4.691598739900934, 3.4499536818307346875),
    (3.236490267686427, 3.527054603759933, 8.546898090670844, 6.052449259453923, 11.687078845074259334),
    (7.029813114278909, 0.9375202830043456, 9.477260390776474, 3.2766344151044415, 16.341565895962647738),
    (4.2790462446154, 1.9037036974484862, 9.394509137143855, 3.628093149227716, 13.122907747218298986),
    (2.6444178259812556, 2.2292940107722705, 0.6736940162662985, 2.239765786166955, 1.970803008945300283),
    (1.191884075689179, 5.108302563847606, 9.984287305920759, 6.0048002008276, 9.8394657937678781486),
    (2.2088150795985797, 5.367925051441847, 2.100965005457114, 5.19188477630717, 0.73892971523132585028),
    (8.580251734146247, 4.500418683498904, 9.902642904142265, 1.1845354033674205, 18.475290701194160219),
    (4.6090860518167105, 3.198783239948884, 0.17771212877421672, 2.984673932569536, 4.4362348992283090982),
    (6.346684828911355, 1.120287432789173, 6.456733108068667, 2.280674178199388, 11.601148372420678265),
    (7.512167249005928, 0.12607513901105322, 0.754995391633243, 0.7663712433144493, 7.0567470412814805768),
    (9.858300228303229, 5.659040163741759, 0.306132146098157, 2.722304016705571, 10.159633807076381788),
    (6.665879317729065, 4.8532526769497055, 6.59601659712246, 0.38110376169671223, 12.782196199472921846),
    (9.09109543874542, 3.4187054973270334, 6.04643946624884, 2.0813795876664867, 14.181270435721575699),
    (5.301739018721293, 5.999805082062998, 2.7073566547042835, 5.241524491239058, 6.0490489753385711272),
    (4.398107618807464, 2.272889903950199, 4.602270262595798, 1.1479294557354782, 7.7436162820241174516),
    (5.494329981474935, 3.6189900540239686, 3.4724168181900996, 5.708937995922555, 8.6768206930793173167),
    (6.385799951562542, 0.6481317961827517, 0.27757798156295865, 3.3314188082720713, 6.6411509978042037231),
    (1.9626932099837646, 2.1020567475816607, 1.3325242116171254, 3.280955984493488, 2.2940226718113045387),
    (7.962538741000463, 1.494385515499905, 9.895609141263538, 4.055193977153661, 17.772607780844978012),
    (0.5767481321559731, 3.070891839438769, 1.236402366936773, 4.162187881337088, 1.1538692649178877412),
    (2.8534473505209523, 0.20004263351719365, 1.1458522407842864, 3.3265753869689503, 3.9992487751655584085),
    (0.5, 1.0, 0.5, 1.000000001, 0.00000000052109534860936626403),
    (0.5, 1.0, 0.5, 1.000001, 0.00000052109530545085099472),
    (0.5, 1.0, 0.5, 1.001, 0.00052109527788562073694),
    (0.5, 0.25, 0.5000001, 0.25, 0.00000009999999994736441522),
    (3.0, 1.0, 3.0, 1.000000001, 0.000000010017875756292589973),
    (3.0, 1.0, 3.0, 1.000001, 0.000010017874926543457095),
    (3.0, 1.0, 3.0, 1.001, 0.010017832619972643556),
    (3.0, 0.25, 3.0000001, 0.25, 0.000000099999999836342112758),
    (8.0, 1.0, 8.0, 1.000000001, 0.000001490478949112183234),
    (8.0, 1.0, 8.0, 1.000001, 0.0014904786877027747331),
    (8.0, 1.0, 8.0, 1.001, 1.3786686678553537448),
    (8.0, 0.25, 8.0000001, 0.25, 0.000000099999999392252902908),
    (10.0, 1.0, 10.0, 1.000000001, 0.000011013233785886708594),
    (10.0, 1.0, 10.0, 1.000001, 0.011013177215834956618),
    (10.0, 1.0, 10.0, 1.001, 4.8144839599692952901),
    (10.0, 0.25, 10.0000001, 0.25, 0.000000099999999392252902908),
    (10.0, 0.0, 10.0, std::f64::consts::PI, 20.0),
    (9.5, 2.0, 0.001, 5.0, 9.5009900024474602601),
    (0.0001, 0.0, 0.0002, 1.0, 0.00016848711481797117854),
];
